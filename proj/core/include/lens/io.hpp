#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lens/types.hpp"

namespace lens {

// Shortest text that is guaranteed to parse back to the same double:
// 17 significant digits, "%.17g" style, locale independent.
std::string format_double(double value);

// Locale-independent strict parse of a whole token. Throws ParseError.
double parse_double(std::string_view token, int line = 0);
long long parse_int(std::string_view token, int line = 0);

// AGF1 attribution map text format:
//   AGF1 <height> <width>
//   <width space-separated reals>   x height
AttributionMap load_map(const std::filesystem::path& path);
AttributionMap parse_map(std::string_view text);
void save_map(const AttributionMap& map, const std::filesystem::path& path);
std::string render_map(const AttributionMap& map);

// Netpbm graymap, ASCII (P2) or binary (P5), maxval up to 65535.
ImageTensor load_pgm(const std::filesystem::path& path);
ImageTensor parse_pgm(std::string_view bytes);
// Writes a binary P5 with the given maxval; pixels are rounded to nearest.
void save_pgm(const ImageTensor& image, const std::filesystem::path& path, int maxval = 255);
std::string render_pgm(const ImageTensor& image, bool binary = true, int maxval = 255);

// CSV with header `path,label`. Paths resolve relative to the manifest.
// Every referenced file must exist; class_count is 1 + the maximum label
// unless `class_count` is given.
DatasetManifest load_manifest(const std::filesystem::path& path, int class_count = 0);

struct LabeledImage {
    std::string id;  // file stem
    ImageTensor image;
    int label = 0;
};

// Loads and parses every image in the manifest.
std::vector<LabeledImage> load_dataset(const DatasetManifest& manifest);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lens
