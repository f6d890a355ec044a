#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lens/random.hpp"
#include "lens/types.hpp"

namespace lens::test {

inline AttributionMap random_map(std::size_t h, std::size_t w, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    std::vector<double> v(h * w);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return AttributionMap(h, w, std::move(v));
}

// Values drawn from a handful of levels so ties are common.
inline AttributionMap tied_map(std::size_t h, std::size_t w, std::uint64_t seed, int levels = 3) {
    Rng rng(seed);
    std::vector<double> v(h * w);
    for (auto& x : v) x = static_cast<double>(rng.below(static_cast<std::uint64_t>(levels)));
    return AttributionMap(h, w, std::move(v));
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("lens_test_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace lens::test
