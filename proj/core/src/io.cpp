#include "lens/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lens/error.hpp"

namespace lens {

// ---- types ---------------------------------------------------------------

AttributionMap::AttributionMap(std::size_t height, std::size_t width, std::vector<double> values)
    : dims_{height, width}, values_(std::move(values)) {
    if (height == 0 || width == 0) {
        throw DomainError("attribution map dimensions must be positive");
    }
    if (values_.size() != height * width) {
        throw DomainError("attribution map has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(height * width));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("attribution map contains a non-finite value");
    }
}

AttributionMap AttributionMap::zeros(Dims dims) {
    return AttributionMap(dims, std::vector<double>(dims.size(), 0.0));
}

double AttributionMap::at(std::size_t row, std::size_t col) const {
    if (row >= dims_.height || col >= dims_.width) throw DomainError("pixel coordinate out of bounds");
    return (*this)(row, col);
}

PixelSet::PixelSet(Dims dims, std::vector<PixelCoord> coords)
    : dims_(dims), coords_(std::move(coords)), mask_(dims.size(), 0) {
    for (const auto& c : coords_) {
        if (c.row >= dims.height || c.col >= dims.width) {
            throw DomainError("pixel (" + std::to_string(c.row) + "," + std::to_string(c.col) +
                              ") out of bounds");
        }
        char& slot = mask_[c.row * dims.width + c.col];
        if (slot) {
            throw DomainError("duplicate pixel (" + std::to_string(c.row) + "," + std::to_string(c.col) + ")");
        }
        slot = 1;
    }
}

bool PixelSet::contains(PixelCoord c) const noexcept {
    return c.row < dims_.height && c.col < dims_.width && mask_[c.row * dims_.width + c.col] != 0;
}

std::vector<char> PixelSet::mask() const { return mask_; }

PixelSet PixelSet::sorted() const {
    auto coords = coords_;
    std::sort(coords.begin(), coords.end());
    return PixelSet(dims_, std::move(coords));
}

ImageTensor::ImageTensor(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> pixels)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
    if (height == 0 || width == 0 || channels == 0) throw DomainError("image dimensions must be positive");
    if (pixels_.size() != height * width * channels) throw DomainError("image pixel count mismatch");
    for (double v : pixels_) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("image pixel outside [0, 1]");
    }
}

AttributionMap collapse_channels(Dims dims, std::size_t channels, std::span<const double> per_channel) {
    if (per_channel.size() != dims.size() * channels) throw DomainError("channel attribution size mismatch");
    if (channels == 1) return AttributionMap(dims, {per_channel.begin(), per_channel.end()});
    std::vector<double> out(dims.size(), 0.0);
    for (std::size_t p = 0; p < dims.size(); ++p) {
        for (std::size_t c = 0; c < channels; ++c) out[p] += std::abs(per_channel[p * channels + c]);
    }
    return AttributionMap(dims, std::move(out));
}

// ---- numbers -------------------------------------------------------------

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, int line) {
    if (token.empty()) throw ParseError("empty number", line);
    // from_chars rejects a leading '+'; accept it for hand-written files.
    if (token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("invalid number '" + std::string(token) + "'", line);
    }
    if (!std::isfinite(value)) throw ParseError("non-finite value '" + std::string(token) + "'", line);
    return value;
}

long long parse_int(std::string_view token, int line) {
    long long value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("invalid integer '" + std::string(token) + "'", line);
    }
    return value;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace

// ---- files ---------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

// ---- AGF1 ----------------------------------------------------------------

AttributionMap parse_map(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty AGF1 file", 1);
    auto header = split_ws(lines[0]);
    if (header.size() != 3 || header[0] != "AGF1") throw ParseError("malformed AGF1 header", 1);
    const long long h = parse_int(header[1], 1);
    const long long w = parse_int(header[2], 1);
    if (h <= 0 || w <= 0) throw ParseError("AGF1 dimensions must be positive", 1);

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(h * w));
    for (long long r = 0; r < h; ++r) {
        const int line_no = static_cast<int>(r) + 2;
        if (static_cast<std::size_t>(r) + 1 >= lines.size()) throw ParseError("missing AGF1 row", line_no);
        auto fields = split_ws(lines[static_cast<std::size_t>(r) + 1]);
        if (static_cast<long long>(fields.size()) != w) {
            throw ParseError("expected " + std::to_string(w) + " values, found " + std::to_string(fields.size()),
                             line_no);
        }
        for (auto f : fields) values.push_back(parse_double(f, line_no));
    }
    for (std::size_t extra = static_cast<std::size_t>(h) + 1; extra < lines.size(); ++extra) {
        if (!split_ws(lines[extra]).empty()) {
            throw ParseError("unexpected content after last row", static_cast<int>(extra) + 1);
        }
    }
    return AttributionMap(static_cast<std::size_t>(h), static_cast<std::size_t>(w), std::move(values));
}

AttributionMap load_map(const std::filesystem::path& path) {
    try {
        return parse_map(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string render_map(const AttributionMap& map) {
    std::string out = "AGF1 " + std::to_string(map.height()) + " " + std::to_string(map.width()) + "\n";
    for (std::size_t r = 0; r < map.height(); ++r) {
        for (std::size_t c = 0; c < map.width(); ++c) {
            if (c) out += ' ';
            out += format_double(map(r, c));
        }
        out += '\n';
    }
    return out;
}

void save_map(const AttributionMap& map, const std::filesystem::path& path) { write_file(path, render_map(map)); }

// ---- PGM -----------------------------------------------------------------

namespace {

class PgmReader {
public:
    explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

    // Next whitespace-delimited header token, skipping '#' comments.
    std::string_view token() {
        for (;;) {
            while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
            if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("truncated PGM");
        return bytes_.substr(start, pos_ - start);
    }

    long long number() {
        auto t = token();
        return parse_int(t);
    }

    // Binary payload starts after exactly one whitespace byte.
    std::string_view payload() {
        if (pos_ >= bytes_.size()) throw ParseError("truncated PGM payload");
        return bytes_.substr(pos_ + 1);
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

ImageTensor parse_pgm(std::string_view bytes) {
    PgmReader reader(bytes);
    const auto magic = reader.token();
    const bool binary = magic == "P5";
    if (!binary && magic != "P2") throw ParseError("unsupported PGM magic '" + std::string(magic) + "'");
    const long long w = reader.number();
    const long long h = reader.number();
    const long long maxval = reader.number();
    if (w <= 0 || h <= 0) throw ParseError("PGM dimensions must be positive");
    if (maxval <= 0 || maxval > 65535) throw ParseError("PGM maxval out of range");

    const std::size_t n = static_cast<std::size_t>(w * h);
    std::vector<double> pixels(n);
    const double scale = static_cast<double>(maxval);
    if (binary) {
        auto data = reader.payload();
        const std::size_t bpp = maxval < 256 ? 1 : 2;
        if (data.size() < n * bpp) throw ParseError("truncated PGM payload");
        for (std::size_t i = 0; i < n; ++i) {
            unsigned v = static_cast<unsigned char>(data[i * bpp]);
            if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(data[i * bpp + 1]);
            if (v > maxval) throw ParseError("PGM sample exceeds maxval");
            pixels[i] = v / scale;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const long long v = reader.number();
            if (v < 0 || v > maxval) throw ParseError("PGM sample out of range");
            pixels[i] = static_cast<double>(v) / scale;
        }
    }
    return ImageTensor(static_cast<std::size_t>(h), static_cast<std::size_t>(w), 1, std::move(pixels));
}

ImageTensor load_pgm(const std::filesystem::path& path) {
    try {
        return parse_pgm(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string render_pgm(const ImageTensor& image, bool binary, int maxval) {
    if (image.channels() != 1) throw DomainError("PGM output requires a single-channel image");
    if (maxval <= 0 || maxval > 65535) throw DomainError("PGM maxval out of range");
    std::string out = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(image.width()) + " " +
                      std::to_string(image.height()) + "\n" + std::to_string(maxval) + "\n";
    const auto px = image.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const auto v = static_cast<unsigned>(std::lround(px[i] * maxval));
        if (binary) {
            if (maxval >= 256) out += static_cast<char>((v >> 8) & 0xff);
            out += static_cast<char>(v & 0xff);
        } else {
            out += std::to_string(v);
            out += ((i + 1) % image.width() == 0) ? '\n' : ' ';
        }
    }
    return out;
}

void save_pgm(const ImageTensor& image, const std::filesystem::path& path, int maxval) {
    write_file(path, render_pgm(image, true, maxval));
}

// ---- manifest ------------------------------------------------------------

DatasetManifest load_manifest(const std::filesystem::path& path, int class_count) {
    const auto text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(path.string() + ": empty manifest", 1);
    std::string_view header = lines[0];
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header != "path,label") throw ParseError(path.string() + ": manifest header must be 'path,label'", 1);

    const auto base = path.parent_path();
    DatasetManifest manifest;
    int max_label = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const int line_no = static_cast<int>(i) + 1;
        const auto comma = line.rfind(',');
        if (comma == std::string_view::npos || comma == 0) {
            throw ParseError(path.string() + ": expected 'path,label'", line_no);
        }
        const long long label = parse_int(line.substr(comma + 1), line_no);
        if (label < 0) throw ParseError(path.string() + ": negative label", line_no);
        const auto file = (base / std::string(line.substr(0, comma))).lexically_normal();
        if (!std::filesystem::exists(file)) {
            throw IoError(path.string() + ": line " + std::to_string(line_no) + ": missing file " + file.string());
        }
        manifest.entries.push_back({file.string(), static_cast<int>(label)});
        max_label = std::max(max_label, static_cast<int>(label));
    }
    if (manifest.entries.empty()) throw ParseError(path.string() + ": manifest has no entries");
    manifest.class_count = class_count > 0 ? class_count : max_label + 1;
    if (max_label >= manifest.class_count) {
        throw ParseError(path.string() + ": label " + std::to_string(max_label) + " exceeds class count");
    }
    return manifest;
}

std::vector<LabeledImage> load_dataset(const DatasetManifest& manifest) {
    std::vector<LabeledImage> out;
    out.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) {
        out.push_back({std::filesystem::path(e.path).stem().string(), load_pgm(e.path), e.label});
    }
    return out;
}

}  // namespace lens
