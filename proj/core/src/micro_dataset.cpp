#include "lens/micro_dataset.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

#include "lens/error.hpp"
#include "lens/random.hpp"

namespace lens {

namespace {

constexpr std::size_t kSide = 8;
constexpr std::size_t kGlyphW = 4;
constexpr std::size_t kGlyphH = 6;

// clang-format off
constexpr std::array<std::array<const char*, kGlyphH>, 10> kGlyphs{{
    {".##.", "#..#", "#..#", "#..#", "#..#", ".##."},
    {".#..", "##..", ".#..", ".#..", ".#..", "###."},
    {".##.", "#..#", "..#.", ".#..", "#...", "####"},
    {"###.", "...#", ".##.", "...#", "...#", "###."},
    {"#..#", "#..#", "####", "...#", "...#", "...#"},
    {"####", "#...", "###.", "...#", "...#", "###."},
    {".##.", "#...", "###.", "#..#", "#..#", ".##."},
    {"####", "...#", "..#.", ".#..", ".#..", ".#.."},
    {".##.", "#..#", ".##.", "#..#", "#..#", ".##."},
    {".##.", "#..#", "#..#", ".###", "...#", ".##."},
}};
// clang-format on

std::string make_id(const std::string& prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", i);
    return prefix + "_" + buf;
}

}  // namespace

std::vector<LabeledImage> make_micro_digits(std::size_t count, std::uint64_t seed, const std::string& prefix) {
    Rng rng(seed);
    std::vector<LabeledImage> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const int label = static_cast<int>(n % 10);
        const std::size_t dr = rng.below(kSide - kGlyphH + 1);
        const std::size_t dc = rng.below(kSide - kGlyphW + 1);
        const double ink = rng.uniform(0.7, 1.0);
        std::vector<double> img(kSide * kSide, 0.0);
        for (std::size_t r = 0; r < kGlyphH; ++r) {
            for (std::size_t c = 0; c < kGlyphW; ++c) {
                if (kGlyphs[static_cast<std::size_t>(label)][r][c] == '#') img[(r + dr) * kSide + c + dc] = ink;
            }
        }
        // Light 3x3 blur so strokes have soft edges.
        const double mix = rng.uniform(0.1, 0.25);
        std::vector<double> blurred(img.size());
        for (std::size_t r = 0; r < kSide; ++r) {
            for (std::size_t c = 0; c < kSide; ++c) {
                double sum = 0.0;
                for (std::size_t p = (r ? r - 1 : 0); p <= std::min(kSide - 1, r + 1); ++p) {
                    for (std::size_t q = (c ? c - 1 : 0); q <= std::min(kSide - 1, c + 1); ++q) sum += img[p * kSide + q];
                }
                blurred[r * kSide + c] = (1.0 - mix) * img[r * kSide + c] + mix * sum / 9.0;
            }
        }
        for (auto& v : blurred) v = std::clamp(v + 0.04 * rng.normal(), 0.0, 1.0);
        out.push_back({make_id(prefix, n), ImageTensor(Dims{kSide, kSide}, std::move(blurred)), label});
    }
    return out;
}

std::vector<LabeledImage> make_blobs(std::size_t count, Dims dims, double spread, std::uint64_t seed) {
    if (dims.size() == 0) throw DomainError("blob dimensions must be positive");
    Rng rng(seed);
    std::vector<LabeledImage> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const int label = static_cast<int>(n % 2);
        const double center = label == 0 ? 0.25 : 0.75;
        std::vector<double> px(dims.size());
        for (auto& v : px) v = std::clamp(center + spread * rng.normal(), 0.0, 1.0);
        out.push_back({make_id("blob", n), ImageTensor(dims, std::move(px)), label});
    }
    return out;
}

void write_dataset(const std::vector<LabeledImage>& images, const std::filesystem::path& dir,
                   const std::filesystem::path& manifest_name) {
    std::filesystem::create_directories(dir);
    std::string manifest = "path,label\n";
    for (const auto& img : images) {
        const std::string file = img.id + ".pgm";
        save_pgm(img.image, dir / file);
        manifest += file + "," + std::to_string(img.label) + "\n";
    }
    write_file(dir / manifest_name, manifest);
}

}  // namespace lens
