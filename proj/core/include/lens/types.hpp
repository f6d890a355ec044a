#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lens {

struct Dims {
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const noexcept { return height * width; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

struct PixelCoord {
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

// Per-pixel importance scores, row-major. Immutable after construction.
class AttributionMap {
public:
    AttributionMap() = default;
    // Throws DomainError on zero dimensions, size mismatch or non-finite values.
    AttributionMap(std::size_t height, std::size_t width, std::vector<double> values);
    AttributionMap(Dims dims, std::vector<double> values)
        : AttributionMap(dims.height, dims.width, std::move(values)) {}

    static AttributionMap zeros(Dims dims);

    std::size_t height() const noexcept { return dims_.height; }
    std::size_t width() const noexcept { return dims_.width; }
    Dims dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return values_.size(); }

    double at(std::size_t row, std::size_t col) const;
    double operator()(std::size_t row, std::size_t col) const noexcept {
        return values_[row * dims_.width + col];
    }
    double operator[](std::size_t flat) const noexcept { return values_[flat]; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const AttributionMap&, const AttributionMap&) = default;

private:
    Dims dims_;
    std::vector<double> values_;
};

// Duplicate-free, in-bounds list of coordinates. Order is meaningful for
// top-k sets (descending score) and otherwise row-major.
class PixelSet {
public:
    PixelSet() = default;
    // Throws DomainError on duplicates or out-of-bounds coordinates.
    PixelSet(Dims dims, std::vector<PixelCoord> coords);

    Dims dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return coords_.size(); }
    bool empty() const noexcept { return coords_.empty(); }
    const std::vector<PixelCoord>& coords() const noexcept { return coords_; }
    auto begin() const noexcept { return coords_.begin(); }
    auto end() const noexcept { return coords_.end(); }

    bool contains(PixelCoord c) const noexcept;
    // Row-major membership mask of length dims().size().
    std::vector<char> mask() const;

    // Same membership, coordinates sorted row-major.
    PixelSet sorted() const;

    friend bool operator==(const PixelSet& a, const PixelSet& b) {
        return a.dims_ == b.dims_ && a.coords_ == b.coords_;
    }

private:
    Dims dims_;
    std::vector<PixelCoord> coords_;
    std::vector<char> mask_;
};

// Grayscale (or multi-channel) image with pixel values in [0, 1].
class ImageTensor {
public:
    ImageTensor() = default;
    // Throws DomainError if any value lies outside [0, 1] or the sizes disagree.
    ImageTensor(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> pixels);
    ImageTensor(Dims dims, std::vector<double> pixels)
        : ImageTensor(dims.height, dims.width, 1, std::move(pixels)) {}

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t channels() const noexcept { return channels_; }
    Dims dims() const noexcept { return {height_, width_}; }
    std::size_t size() const noexcept { return pixels_.size(); }
    std::span<const double> pixels() const noexcept { return pixels_; }

    friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> pixels_;
};

struct ManifestEntry {
    std::string path;  // resolved against the manifest directory
    int label = 0;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    int class_count = 0;
};

// Collapse a per-channel attribution (channel-interleaved, HWC) into one
// score per pixel by summing absolute values across channels.
AttributionMap collapse_channels(Dims dims, std::size_t channels, std::span<const double> per_channel);

}  // namespace lens
