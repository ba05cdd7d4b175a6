#ifndef BFTEX_IMAGING_HPP_
#define BFTEX_IMAGING_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace bftex {

//----------------------------------------------------------------------------//
// GrayImage
//----------------------------------------------------------------------------//

/// Row-major double-precision grayscale raster. Intensities are nominally in
/// [0,1] after loading; filter responses may leave that range.
class GrayImage {
public:
    GrayImage(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), data_(width * height, fill) {
        if (width == 0 || height == 0)
            throw ContractViolation("GrayImage: width and height must be >= 1");
    }

    GrayImage(std::size_t width, std::size_t height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width == 0 || height == 0)
            throw ContractViolation("GrayImage: width and height must be >= 1");
        if (data_.size() != width * height)
            throw ContractViolation("GrayImage: data length != width * height");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    double operator()(std::size_t row, std::size_t col) const noexcept { return data_[row * width_ + col]; }
    double& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }

    std::span<const double> pixels() const& noexcept { return data_; }
    std::span<double> pixels() & noexcept { return data_; }
    /// On a temporary the buffer is moved out, so `for (v : f().pixels())` is safe.
    std::vector<double> pixels() && noexcept { return std::move(data_); }

    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * width_, width_}; }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * width_, width_}; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> data_;
};

/// Rescales intensities linearly onto [0,1]; a constant image maps to 0.
inline GrayImage normalize(const GrayImage& img) {
    auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    double a = *lo, span = *hi - *lo;
    GrayImage out(img.width(), img.height());
    auto dst = out.pixels();
    auto src = img.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = span > 0 ? (src[i] - a) / span : 0.0;
    return out;
}

/// Quarter-turn counter-clockwise rotation (exact on the grid).
inline GrayImage rotate90(const GrayImage& img) {
    GrayImage out(img.height(), img.width());
    for (std::size_t r = 0; r < img.height(); ++r)
        for (std::size_t c = 0; c < img.width(); ++c)
            out(img.width() - 1 - c, r) = img(r, c);
    return out;
}

inline double mean(const GrayImage& img) {
    double s = 0;
    for (double v : img.pixels()) s += v;
    return s / static_cast<double>(img.size());
}

/// Population standard deviation of the intensities.
inline double stddev(const GrayImage& img) {
    double m = mean(img), s = 0;
    for (double v : img.pixels()) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(img.size()));
}

//----------------------------------------------------------------------------//
// Kernels and separable convolution
//----------------------------------------------------------------------------//

/// Odd-length 1-D filter; `taps[radius + i]` is the weight at offset i.
struct Kernel1D {
    std::vector<double> taps;
    std::size_t radius = 0;

    double at(std::ptrdiff_t offset) const { return taps[static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(radius))]; }
};

/// Truncation radius shared by every sampled Gaussian (and its derivatives).
inline std::size_t gaussian_radius(double sigma) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil(3.0 * sigma)));
}

/// Sampled Gaussian, radius ceil(3 sigma), normalized to unit sum.
inline Kernel1D gaussian_kernel_1d(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("gaussian_kernel_1d: sigma must be > 0");
    Kernel1D k;
    k.radius = gaussian_radius(sigma);
    k.taps.resize(2 * k.radius + 1);
    const auto r = static_cast<std::ptrdiff_t>(k.radius);
    double sum = 0;
    for (std::ptrdiff_t i = -r; i <= r; ++i) {
        double v = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
        k.taps[static_cast<std::size_t>(i + r)] = v;
        sum += v;
    }
    for (double& t : k.taps) t /= sum;
    return k;
}

namespace detail {

inline std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
    if (i < 0) return 0;
    if (static_cast<std::size_t>(i) >= n) return n - 1;
    return static_cast<std::size_t>(i);
}

// out(c) = sum_i k[i] * in(clamp(c - i)) along each row.
inline GrayImage convolve_rows(const GrayImage& img, const Kernel1D& k) {
    const std::size_t w = img.width(), r = k.radius;
    GrayImage out(w, img.height());
    std::vector<double> padded(w + 2 * r);
    for (std::size_t y = 0; y < img.height(); ++y) {
        auto src = img.row(y);
        for (std::size_t j = 0; j < padded.size(); ++j)
            padded[j] = src[clamp_index(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(r), w)];
        auto dst = out.row(y);
        const double* taps = k.taps.data();
        const std::size_t n = k.taps.size();
        for (std::size_t x = 0; x < w; ++x) {
            // padded[x + r - i] for i in [-r, r]  ==  padded[x + (2r - t)] for t = i + r
            const double* p = padded.data() + x + 2 * r;
            double acc = 0;
            for (std::size_t t = 0; t < n; ++t) acc += taps[t] * p[-static_cast<std::ptrdiff_t>(t)];
            dst[x] = acc;
        }
    }
    return out;
}

inline GrayImage convolve_cols(const GrayImage& img, const Kernel1D& k) {
    const std::size_t w = img.width(), h = img.height();
    const auto r = static_cast<std::ptrdiff_t>(k.radius);
    GrayImage out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        auto dst = out.row(y);
        for (std::ptrdiff_t i = -r; i <= r; ++i) {
            const double wgt = k.at(i);
            auto src = img.row(clamp_index(static_cast<std::ptrdiff_t>(y) - i, h));
            for (std::size_t x = 0; x < w; ++x) dst[x] += wgt * src[x];
        }
    }
    return out;
}

} // namespace detail

/// 2-D convolution with the outer product `col_kernel x row_kernel`, clamp-to-edge
/// borders. `row_kernel` runs along x (columns), `col_kernel` along y (rows).
inline GrayImage convolve_separable(const GrayImage& img, const Kernel1D& row_kernel, const Kernel1D& col_kernel) {
    return detail::convolve_cols(detail::convolve_rows(img, row_kernel), col_kernel);
}

inline GrayImage convolve_separable(const GrayImage& img, const Kernel1D& k) {
    return convolve_separable(img, k, k);
}

inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    return convolve_separable(img, gaussian_kernel_1d(sigma));
}

//----------------------------------------------------------------------------//
// Netpbm I/O
//----------------------------------------------------------------------------//

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return bytes;
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

// Netpbm header tokenizer: whitespace separated decimal integers, '#' comments.
class PnmHeaderReader {
public:
    PnmHeaderReader(std::string_view bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

    std::size_t pos() const noexcept { return pos_; }

    unsigned long next_uint(const char* what) {
        skip_space_and_comments();
        std::size_t start = pos_;
        unsigned long v = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            v = v * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
            if (v > 0xFFFFFFFFul) throw ParseError(std::string("PNM: ") + what + " out of range", start);
            ++pos_;
        }
        if (pos_ == start) throw ParseError(std::string("PNM: expected ") + what, start);
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void single_whitespace() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
            throw ParseError("PNM: expected single whitespace before raster", pos_);
        ++pos_;
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Decodes an in-memory binary PGM (P5) or PPM (P6). Samples are divided by
/// maxval; PPM pixels are reduced to luma 0.299R + 0.587G + 0.114B.
inline GrayImage decode_pnm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw ParseError("PNM: missing magic number", 0);
    const char kind = bytes[1];
    if (kind != '5' && kind != '6') {
        if (kind >= '1' && kind <= '7')
            throw UnsupportedFormat(std::string("PNM: unsupported variant P") + kind + " (only P5/P6)");
        throw ParseError("PNM: bad magic number", 0);
    }
    detail::PnmHeaderReader hdr(bytes, 2);
    const unsigned long width = hdr.next_uint("width");
    const unsigned long height = hdr.next_uint("height");
    const std::size_t maxval_pos = hdr.pos();
    const unsigned long maxval = hdr.next_uint("maxval");
    if (width == 0 || height == 0) throw ParseError("PNM: zero image dimension", 2);
    if (maxval == 0 || maxval > 65535)
        throw UnsupportedFormat("PNM: unsupported maxval " + std::to_string(maxval) + " at byte " +
                                std::to_string(maxval_pos));
    hdr.single_whitespace();
    const std::size_t offset = hdr.pos();

    const std::size_t channels = kind == '6' ? 3 : 1;
    const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    const std::size_t need = n * channels * bytes_per_sample;
    if (bytes.size() - offset < need)
        throw ParseError("PNM: truncated raster (need " + std::to_string(need) + " bytes, have " +
                             std::to_string(bytes.size() - offset) + ")",
                         bytes.size());

    const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
    auto sample = [&](std::size_t i) -> double {
        if (bytes_per_sample == 1) return raster[i];
        return static_cast<double>((raster[2 * i] << 8) | raster[2 * i + 1]);
    };
    // Division (not multiplication by 1/maxval) so v/255 matches quantize8 exactly.
    const double denom = static_cast<double>(maxval);
    std::vector<double> data(n);
    for (std::size_t p = 0; p < n; ++p) {
        double v = channels == 1
                       ? sample(p)
                       : 0.299 * sample(3 * p) + 0.587 * sample(3 * p + 1) + 0.114 * sample(3 * p + 2);
        data[p] = v / denom;
    }
    return GrayImage(width, height, std::move(data));
}

inline GrayImage load_image(const std::filesystem::path& path) {
    try {
        return decode_pnm(detail::read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset());
    } catch (const UnsupportedFormat& e) {
        throw UnsupportedFormat(path.string() + ": " + e.what());
    }
}

/// 8-bit P5 encoding after clamping to [0,1].
inline std::string encode_pgm(const GrayImage& img) {
    std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    out.reserve(out.size() + img.size());
    for (double v : img.pixels()) {
        double c = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
    return out;
}

inline void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    detail::write_file(path, encode_pgm(img));
}

/// Round-to-8-bit of every pixel, as a save_pgm/load_image round trip would do.
inline GrayImage quantize8(const GrayImage& img) {
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = static_cast<double>(std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0)) / 255.0;
    return out;
}

//----------------------------------------------------------------------------//
// CSV matrices (full precision, locale independent)
//----------------------------------------------------------------------------//

/// Shortest representation that parses back to the same double.
inline void append_double(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

/// Fixed-point with `digits` decimals.
inline void append_fixed(std::string& out, double v, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    out.append(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("CSV: bad number '" + std::string(s) + "' on line " + std::to_string(line), line, true);
    return v;
}

inline std::string encode_csv_matrix(const GrayImage& img) {
    std::string out;
    out.reserve(img.size() * 20);
    for (std::size_t y = 0; y < img.height(); ++y) {
        auto r = img.row(y);
        for (std::size_t x = 0; x < r.size(); ++x) {
            if (x) out.push_back(',');
            append_double(out, r[x]);
        }
        out.push_back('\n');
    }
    return out;
}

inline GrayImage decode_csv_matrix(std::string_view text) {
    std::vector<double> data;
    std::size_t width = 0, height = 0, line = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view row = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line;
        if (row.empty() || row == "\r") continue;
        std::size_t cols = 0;
        while (true) {
            auto comma = row.find(',');
            data.push_back(parse_double(row.substr(0, comma), line));
            ++cols;
            if (comma == std::string_view::npos) break;
            row.remove_prefix(comma + 1);
        }
        if (height == 0) width = cols;
        else if (cols != width) throw ParseError("CSV: ragged row on line " + std::to_string(line), line, true);
        ++height;
    }
    if (height == 0) throw ParseError("CSV: empty matrix", 0, true);
    return GrayImage(width, height, std::move(data));
}

inline void save_csv_matrix(const GrayImage& img, const std::filesystem::path& path) {
    detail::write_file(path, encode_csv_matrix(img));
}

inline GrayImage load_csv_matrix(const std::filesystem::path& path) {
    return decode_csv_matrix(detail::read_file(path));
}

} // namespace bftex

#endif // BFTEX_IMAGING_HPP_
