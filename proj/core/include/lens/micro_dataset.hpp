#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lens/io.hpp"

namespace lens {

// 8x8 digit-like grayscale images rendered from 4x6 glyphs with random
// placement, stroke intensity, blur and noise. Ten classes.
// Image ids are <prefix>_<index>, zero padded to four digits.
std::vector<LabeledImage> make_micro_digits(std::size_t count, std::uint64_t seed, const std::string& prefix = "digit");

// Two Gaussian blobs in a dims.size()-dimensional [0,1] box: class 0 around
// 0.25, class 1 around 0.75, isotropic standard deviation `spread`.
std::vector<LabeledImage> make_blobs(std::size_t count, Dims dims, double spread, std::uint64_t seed);

// Writes <dir>/<id>.pgm for every image and a `path,label` manifest.
void write_dataset(const std::vector<LabeledImage>& images, const std::filesystem::path& dir,
                   const std::filesystem::path& manifest_name);

}  // namespace lens
