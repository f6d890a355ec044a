#pragma once

#include <stdexcept>
#include <string>

namespace lens {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file content (AGF1, PGM, manifest, checkpoint).
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Precondition violated: shape mismatch, k out of range, bad schedule.
class DomainError : public Error {
public:
    using Error::Error;
};

// Diverse selection could not place the requested number of pixels.
class CapacityError : public Error {
public:
    CapacityError(const std::string& what, std::size_t achievable)
        : Error(what), achievable_(achievable) {}
    std::size_t achievable() const noexcept { return achievable_; }

private:
    std::size_t achievable_;
};

// Rank correlation of a map with zero rank variance.
class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

class TrainingDivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace lens
