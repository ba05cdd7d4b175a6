#ifndef BFTEX_DESCRIPTORS_HPP_
#define BFTEX_DESCRIPTORS_HPP_

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "imaging.hpp"
#include "preproc_baselines.hpp"
#include "retina_filter.hpp"

namespace bftex {

//----------------------------------------------------------------------------//
// Circular neighbourhoods
//----------------------------------------------------------------------------//

/// P neighbours on a circle of radius R.
struct NeighborhoodSpec {
    unsigned P = 8;
    double R = 1.0;

    void validate() const {
        if (P < 4 || P > 24) throw DomainError("NeighborhoodSpec: P must be in [4, 24] (got " + std::to_string(P) + ")");
        if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("NeighborhoodSpec: R must be > 0");
    }

    /// Distance from the image border below which pixels are not encoded.
    std::size_t margin() const { return static_cast<std::size_t>(std::ceil(R)) + 1; }

    friend bool operator==(const NeighborhoodSpec&, const NeighborhoodSpec&) = default;
};

/// Bilinear sampling template of one neighbour, relative to the centre pixel.
struct NeighborTap {
    std::ptrdiff_t dy = 0, dx = 0;  // top-left integer offset
    double wy = 0, wx = 0;          // fractional parts
    bool exact = true;
};

/// Neighbour k sits at (drow, dcol) = (-R sin(2 pi k / P), R cos(2 pi k / P)).
/// Offsets within 1e-9 of an integer are snapped so grid hits read pixels directly.
inline std::vector<NeighborTap> neighbor_taps(const NeighborhoodSpec& spec) {
    spec.validate();
    std::vector<NeighborTap> taps(spec.P);
    for (unsigned k = 0; k < spec.P; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / spec.P;
        double dy = -spec.R * std::sin(theta);
        double dx = spec.R * std::cos(theta);
        if (std::abs(dy - std::round(dy)) < 1e-9) dy = std::round(dy);
        if (std::abs(dx - std::round(dx)) < 1e-9) dx = std::round(dx);
        NeighborTap& t = taps[k];
        const double fy = std::floor(dy), fx = std::floor(dx);
        t.dy = static_cast<std::ptrdiff_t>(fy);
        t.dx = static_cast<std::ptrdiff_t>(fx);
        t.wy = dy - fy;
        t.wx = dx - fx;
        t.exact = t.wy == 0.0 && t.wx == 0.0;
    }
    return taps;
}

namespace detail {

inline double sample_tap(const GrayImage& img, std::size_t row, std::size_t col, const NeighborTap& t) {
    const auto r = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(row) + t.dy);
    const auto c = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(col) + t.dx);
    if (t.exact) return img(r, c);
    // Nested lerps: exact on flat neighbourhoods, so a constant image samples
    // back to the same constant.
    const double top = img(r, c) + t.wx * (img(r, c + 1) - img(r, c));
    const double bottom = img(r + 1, c) + t.wx * (img(r + 1, c + 1) - img(r + 1, c));
    return top + t.wy * (bottom - top);
}

inline void require_encodable(const GrayImage& img, std::size_t margin, const char* who) {
    const std::size_t need = 2 * margin + 1;
    if (img.width() < need || img.height() < need)
        throw ContractViolation(std::string(who) + ": image " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + " too small (need at least " + std::to_string(need) +
                                "x" + std::to_string(need) + ")");
}

} // namespace detail

/// The P circular neighbours of pixel (row, col); the pixel must lie in the
/// encodable interior (spec.margin() away from every border).
inline std::vector<double> sample_neighbors(const GrayImage& img, std::size_t row, std::size_t col,
                                            const NeighborhoodSpec& spec) {
    const std::size_t m = spec.margin();
    if (row < m || col < m || row + m >= img.height() || col + m >= img.width())
        throw ContractViolation("sample_neighbors: (" + std::to_string(row) + "," + std::to_string(col) +
                                ") is outside the encodable interior");
    std::vector<double> out;
    out.reserve(spec.P);
    for (const auto& t : neighbor_taps(spec)) out.push_back(detail::sample_tap(img, row, col, t));
    return out;
}

//----------------------------------------------------------------------------//
// Rotation-invariant uniform mapping
//----------------------------------------------------------------------------//

/// Number of circular 0/1 transitions in a P-bit pattern.
inline unsigned circular_transitions(std::uint32_t code, unsigned P) {
    const std::uint32_t mask = P == 32 ? ~0u : ((1u << P) - 1u);
    code &= mask;
    const std::uint32_t rotated = ((code >> 1) | (code << (P - 1))) & mask;
    return static_cast<unsigned>(std::popcount(code ^ rotated));
}

/// riu2 label: popcount for uniform patterns (<= 2 transitions), P + 1 otherwise.
inline unsigned riu2_label(std::uint32_t code, unsigned P) {
    return circular_transitions(code, P) <= 2 ? static_cast<unsigned>(std::popcount(code)) : P + 1;
}

inline std::vector<std::uint8_t> riu2_map(unsigned P) {
    if (P == 0 || P > 24) throw DomainError("riu2_map: P must be in [1, 24]");
    std::vector<std::uint8_t> table(std::size_t{1} << P);
    for (std::uint32_t c = 0; c < table.size(); ++c) table[c] = static_cast<std::uint8_t>(riu2_label(c, P));
    return table;
}

//----------------------------------------------------------------------------//
// Descriptor configuration
//----------------------------------------------------------------------------//

enum class Family { Lbp, Clbp, Clbc, Ltp, Wld };

/// Combination scheme of the completed models. `_` concatenates histograms,
/// `/` builds a joint histogram.
enum class Scheme { S, M, C, S_M, SjM, SjC, MjC, M_SjC, S_MjC, SjMjC };

inline constexpr std::array<std::pair<Scheme, std::string_view>, 10> kSchemeNames{{
    {Scheme::S, "S"},
    {Scheme::M, "M"},
    {Scheme::C, "C"},
    {Scheme::S_M, "S_M"},
    {Scheme::SjM, "S/M"},
    {Scheme::SjC, "S/C"},
    {Scheme::MjC, "M/C"},
    {Scheme::M_SjC, "M_S/C"},
    {Scheme::S_MjC, "S_M/C"},
    {Scheme::SjMjC, "S/M/C"},
}};

inline std::string_view to_string(Scheme s) {
    for (auto& [k, n] : kSchemeNames)
        if (k == s) return n;
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
    for (auto& [k, n] : kSchemeNames)
        if (n == name) return k;
    return std::nullopt;
}

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::Lbp: return "lbp";
        case Family::Clbp: return "clbp";
        case Family::Clbc: return "clbc";
        case Family::Ltp: return "ltp";
        case Family::Wld: return "wld";
    }
    return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
    for (Family f : {Family::Lbp, Family::Clbp, Family::Clbc, Family::Ltp, Family::Wld})
        if (to_string(f) == name) return f;
    return std::nullopt;
}

/// Standard WLD quantisation: T orientations, M excitation segments of S bins.
struct WldParams {
    unsigned T = 8;
    unsigned M = 6;
    unsigned S = 20;

    friend bool operator==(const WldParams&, const WldParams&) = default;
};

struct DescriptorConfig {
    Family family = Family::Lbp;
    Scheme scheme = Scheme::S;
    NeighborhoodSpec spec{};
    double ltp_t = 5.0 / 255.0;
    WldParams wld{};

    /// Display tag, e.g. "LBP", "CLBP_S/M/C", "CLBC_S", "LTP", "WLD".
    std::string tag() const {
        switch (family) {
            case Family::Lbp: return "LBP";
            case Family::Ltp: return "LTP";
            case Family::Wld: return "WLD";
            case Family::Clbp: return "CLBP_" + std::string(to_string(scheme));
            case Family::Clbc: return "CLBC_" + std::string(to_string(scheme));
        }
        return "?";
    }

    void validate() const {
        if (family == Family::Wld) {
            if (wld.T == 0 || wld.M == 0 || wld.S == 0) throw DomainError("WLD: T, M and S must be >= 1");
            return;
        }
        spec.validate();
        if ((family == Family::Lbp || family == Family::Ltp) && scheme != Scheme::S)
            throw ContractViolation(std::string(to_string(family)) + " has no combination schemes");
        if (family == Family::Ltp && !(ltp_t >= 0.0)) throw DomainError("LTP: threshold t must be >= 0");
    }

    friend bool operator==(const DescriptorConfig&, const DescriptorConfig&) = default;
};

/// Parses "family[:scheme]:P:R" ("lbp:8:1", "clbp:S/M/C:16:2", "ltp:24:3") or "wld".
inline DescriptorConfig parse_descriptor(std::string_view text) {
    std::vector<std::string_view> parts;
    while (true) {
        auto colon = text.find(':');
        parts.push_back(text.substr(0, colon));
        if (colon == std::string_view::npos) break;
        text.remove_prefix(colon + 1);
    }
    auto fam = parse_family(parts[0]);
    if (!fam) throw ConfigError("unknown descriptor family '" + std::string(parts[0]) + "'");
    DescriptorConfig cfg;
    cfg.family = *fam;
    if (cfg.family == Family::Wld) {
        if (parts.size() != 1) throw ConfigError("wld takes no parameters");
        return cfg;
    }
    const bool completed = cfg.family == Family::Clbp || cfg.family == Family::Clbc;
    const std::size_t expected = completed ? 4 : 3;
    if (parts.size() != expected)
        throw ConfigError("descriptor '" + std::string(parts[0]) + "' expects " +
                          (completed ? "family:scheme:P:R" : "family:P:R"));
    std::size_t i = 1;
    if (completed) {
        auto sch = parse_scheme(parts[i]);
        if (!sch) throw ConfigError("unknown scheme '" + std::string(parts[i]) + "'");
        cfg.scheme = *sch;
        ++i;
    }
    try {
        cfg.spec.P = static_cast<unsigned>(std::stoul(std::string(parts[i])));
        cfg.spec.R = parse_double(parts[i + 1], 0);
    } catch (const std::exception&) {
        throw ConfigError("bad P/R in descriptor specification");
    }
    cfg.validate();
    return cfg;
}

inline std::string format_descriptor(const DescriptorConfig& cfg) {
    std::string out(to_string(cfg.family));
    if (cfg.family == Family::Wld) return out;
    if (cfg.family == Family::Clbp || cfg.family == Family::Clbc) out += ":" + std::string(to_string(cfg.scheme));
    out += ":" + std::to_string(cfg.spec.P) + ":";
    append_double(out, cfg.spec.R);
    return out;
}

//----------------------------------------------------------------------------//
// Histogram
//----------------------------------------------------------------------------//

struct Histogram {
    std::vector<double> bins;
    std::string scheme;
    std::vector<std::size_t> dims;  // joint shape, fastest axis first

    std::size_t size() const noexcept { return bins.size(); }

    void normalize() {
        double s = 0;
        for (double b : bins) s += b;
        if (s > 0)
            for (double& b : bins) b /= s;
    }

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// Bin count of one operator: riu2 patterns have P + 2 labels, counts P + 1.
inline std::size_t operator_bins(Family family, unsigned P) {
    return family == Family::Clbc ? P + 1 : P + 2;
}

/// Joint shape of a completed-model scheme given B bins per S/M operator.
inline std::vector<std::size_t> scheme_dims(Scheme s, std::size_t B) {
    switch (s) {
        case Scheme::S:
        case Scheme::M: return {B};
        case Scheme::C: return {2};
        case Scheme::S_M: return {2 * B};
        case Scheme::SjM: return {B, B};
        case Scheme::SjC:
        case Scheme::MjC: return {B, 2};
        case Scheme::M_SjC:
        case Scheme::S_MjC: return {3 * B};
        case Scheme::SjMjC: return {B, B, 2};
    }
    return {};
}

inline std::size_t product(const std::vector<std::size_t>& dims) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

inline std::vector<std::size_t> descriptor_dims(const DescriptorConfig& cfg) {
    switch (cfg.family) {
        case Family::Lbp: return {cfg.spec.P + 2u};
        case Family::Ltp: return {2 * (cfg.spec.P + 2u)};
        case Family::Wld: return {cfg.wld.S, cfg.wld.T, cfg.wld.M};
        case Family::Clbp:
        case Family::Clbc: return scheme_dims(cfg.scheme, operator_bins(cfg.family, cfg.spec.P));
    }
    return {};
}

/// Histogram length of a descriptor; doubled for ON/OFF map pairs.
inline std::size_t feature_size(const DescriptorConfig& cfg, bool on_off_pair = false) {
    return product(descriptor_dims(cfg)) * (on_off_pair ? 2 : 1);
}

//----------------------------------------------------------------------------//
// Per-pixel codes
//----------------------------------------------------------------------------//

/// Labels of every encoded (interior) pixel, row-major over the interior.
/// For CLBP/CLBC `s`, `m`, `c` are sign, magnitude and centre operators; for
/// LTP `s` and `m` carry the upper and lower patterns and `c` is unused.
struct LabelMap {
    std::size_t width = 0, height = 0;
    std::size_t bins = 0;  // label range of s and m
    std::vector<std::uint16_t> s, m;
    std::vector<std::uint8_t> c;

    std::size_t count() const noexcept { return s.size(); }
};

/// Raw P-bit patterns shared by the CLBP, CLBC and LTP encoders.
struct LocalPatterns {
    std::size_t width = 0, height = 0;
    unsigned P = 0;
    std::vector<std::uint32_t> sign;       // [neighbour >= centre]
    std::vector<std::uint32_t> magnitude;  // [|neighbour - centre| >= c_M]
    std::vector<std::uint8_t> center;      // [centre >= c_I]
    double magnitude_threshold = 0;        // c_M
    double center_threshold = 0;           // c_I
};

/// Sign, magnitude and centre patterns. c_M is the mean absolute neighbour
/// difference over the whole interior, c_I the mean interior intensity.
inline LocalPatterns local_patterns(const GrayImage& img, const NeighborhoodSpec& spec) {
    const auto taps = neighbor_taps(spec);
    const std::size_t margin = spec.margin();
    detail::require_encodable(img, margin, "local_patterns");
    LocalPatterns out;
    out.P = spec.P;
    out.width = img.width() - 2 * margin;
    out.height = img.height() - 2 * margin;
    const std::size_t n = out.width * out.height;
    out.sign.resize(n);
    out.magnitude.resize(n);
    out.center.resize(n);

    // Samples are kept so the magnitude pass can reuse them once c_M is known.
    std::vector<double> diffs(n * spec.P);
    double diff_sum = 0, center_sum = 0;
    double diff_max = 0, center_min = img(margin, margin), center_max = center_min;
    std::size_t idx = 0;
    for (std::size_t y = margin; y + margin < img.height(); ++y) {
        for (std::size_t x = margin; x + margin < img.width(); ++x, ++idx) {
            const double gc = img(y, x);
            center_sum += gc;
            center_min = std::min(center_min, gc);
            center_max = std::max(center_max, gc);
            std::uint32_t code = 0;
            for (unsigned k = 0; k < spec.P; ++k) {
                const double d = detail::sample_tap(img, y, x, taps[k]) - gc;
                if (d >= 0) code |= 1u << k;
                diff_sum += std::abs(d);
                diff_max = std::max(diff_max, std::abs(d));
                diffs[idx * spec.P + k] = d;
            }
            out.sign[idx] = code;
        }
    }
    // A rounded mean can fall outside the range it averages (a constant image
    // would then code its centres as 0), so it is clamped back into range.
    out.magnitude_threshold = std::min(diff_sum / static_cast<double>(n * spec.P), diff_max);
    out.center_threshold = std::clamp(center_sum / static_cast<double>(n), center_min, center_max);

    idx = 0;
    for (std::size_t y = margin; y + margin < img.height(); ++y) {
        for (std::size_t x = margin; x + margin < img.width(); ++x, ++idx) {
            std::uint32_t code = 0;
            const double* d = diffs.data() + idx * spec.P;
            for (unsigned k = 0; k < spec.P; ++k)
                if (std::abs(d[k]) >= out.magnitude_threshold) code |= 1u << k;
            out.magnitude[idx] = code;
            out.center[idx] = img(y, x) >= out.center_threshold ? 1 : 0;
        }
    }
    return out;
}

inline LabelMap clbp_codes(const GrayImage& img, const NeighborhoodSpec& spec) {
    const LocalPatterns pat = local_patterns(img, spec);
    LabelMap out{pat.width, pat.height, spec.P + 2u, {}, {}, pat.center};
    out.s.resize(pat.sign.size());
    out.m.resize(pat.sign.size());
    for (std::size_t i = 0; i < pat.sign.size(); ++i) {
        out.s[i] = static_cast<std::uint16_t>(riu2_label(pat.sign[i], spec.P));
        out.m[i] = static_cast<std::uint16_t>(riu2_label(pat.magnitude[i], spec.P));
    }
    return out;
}

/// Completed local binary count: the number of set comparisons, P + 1 labels.
inline LabelMap clbc_codes(const GrayImage& img, const NeighborhoodSpec& spec) {
    const LocalPatterns pat = local_patterns(img, spec);
    LabelMap out{pat.width, pat.height, spec.P + 1u, {}, {}, pat.center};
    out.s.resize(pat.sign.size());
    out.m.resize(pat.sign.size());
    for (std::size_t i = 0; i < pat.sign.size(); ++i) {
        out.s[i] = static_cast<std::uint16_t>(std::popcount(pat.sign[i]));
        out.m[i] = static_cast<std::uint16_t>(std::popcount(pat.magnitude[i]));
    }
    return out;
}

/// Local ternary pattern split into upper [n >= c + t] (in `s`) and lower
/// [n <= c - t] (in `m`) riu2 labels.
inline LabelMap ltp_codes(const GrayImage& img, const NeighborhoodSpec& spec, double t) {
    if (!(t >= 0.0)) throw DomainError("ltp_codes: t must be >= 0");
    const auto taps = neighbor_taps(spec);
    const std::size_t margin = spec.margin();
    detail::require_encodable(img, margin, "ltp_codes");
    LabelMap out;
    out.width = img.width() - 2 * margin;
    out.height = img.height() - 2 * margin;
    out.bins = spec.P + 2u;
    out.s.reserve(out.width * out.height);
    out.m.reserve(out.width * out.height);
    for (std::size_t y = margin; y + margin < img.height(); ++y) {
        for (std::size_t x = margin; x + margin < img.width(); ++x) {
            const double gc = img(y, x);
            std::uint32_t upper = 0, lower = 0;
            for (unsigned k = 0; k < spec.P; ++k) {
                const double v = detail::sample_tap(img, y, x, taps[k]);
                if (v >= gc + t) upper |= 1u << k;
                if (v <= gc - t) lower |= 1u << k;
            }
            out.s.push_back(static_cast<std::uint16_t>(riu2_label(upper, spec.P)));
            out.m.push_back(static_cast<std::uint16_t>(riu2_label(lower, spec.P)));
        }
    }
    return out;
}

//----------------------------------------------------------------------------//
// Histogram construction
//----------------------------------------------------------------------------//

/// Normalized histogram of a label map under a combination scheme. Joint
/// indices are s + B*m (+ B^2*c), or s + B*c / m + B*c for the 2-D schemes;
/// concatenations place the first-named operator first.
inline Histogram build_histogram(const LabelMap& labels, Scheme scheme, std::string tag = {}) {
    const std::size_t B = labels.bins;
    const std::size_t n = labels.count();
    const bool needs_c = scheme == Scheme::C || scheme == Scheme::SjC || scheme == Scheme::MjC ||
                         scheme == Scheme::M_SjC || scheme == Scheme::S_MjC || scheme == Scheme::SjMjC;
    if (labels.m.size() != n || (needs_c && labels.c.size() != n))
        throw ContractViolation("build_histogram: label map lacks operators required by scheme " +
                                std::string(to_string(scheme)));
    Histogram h;
    h.dims = scheme_dims(scheme, B);
    h.scheme = tag.empty() ? std::string(to_string(scheme)) : std::move(tag);
    std::vector<std::uint64_t> counts(product(h.dims), 0);
    auto bump = [&](std::size_t i) {
        if (i >= counts.size()) throw ContractViolation("build_histogram: label out of range for scheme");
        ++counts[i];
    };
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = labels.s[i], m = labels.m[i];
        const std::size_t c = needs_c ? labels.c[i] : 0;
        if (s >= B || m >= B || c > 1) throw ContractViolation("build_histogram: label out of range for scheme");
        switch (scheme) {
            case Scheme::S: bump(s); break;
            case Scheme::M: bump(m); break;
            case Scheme::C: bump(c); break;
            case Scheme::S_M: bump(s); bump(B + m); break;
            case Scheme::SjM: bump(s + B * m); break;
            case Scheme::SjC: bump(s + B * c); break;
            case Scheme::MjC: bump(m + B * c); break;
            case Scheme::M_SjC: bump(m); bump(B + s + B * c); break;
            case Scheme::S_MjC: bump(s); bump(B + m + B * c); break;
            case Scheme::SjMjC: bump(s + B * m + B * B * c); break;
        }
    }
    h.bins.assign(counts.begin(), counts.end());
    h.normalize();
    return h;
}

/// Concatenation of the upper and lower LTP histograms, 2(P + 2) bins.
inline Histogram ltp_histogram(const GrayImage& img, const NeighborhoodSpec& spec, double t) {
    return build_histogram(ltp_codes(img, spec, t), Scheme::S_M, "LTP");
}

/// Weber local descriptor over 3x3 neighbourhoods.
///
/// Differential excitation xi = atan(sum_i (x_i - x_c) / max(x_c, 1/255)) is
/// split into M equal segments of (-pi/2, pi/2), each holding S sub-bins.
/// Orientation atan2(below - above, right - left), mapped onto [0, 2pi), is
/// quantised to T dominant directions. Bin index = (segment * T + t) * S + sub.
inline Histogram wld_histogram(const GrayImage& img, const WldParams& p = {}) {
    if (p.T == 0 || p.M == 0 || p.S == 0) throw DomainError("wld_histogram: T, M and S must be >= 1");
    detail::require_encodable(img, 1, "wld_histogram");
    constexpr double kPi = std::numbers::pi;
    constexpr double kMinCenter = 1.0 / 255.0;
    Histogram h;
    h.dims = {p.S, p.T, p.M};
    h.scheme = "WLD";
    std::vector<std::uint64_t> counts(std::size_t{p.S} * p.T * p.M, 0);
    for (std::size_t y = 1; y + 1 < img.height(); ++y) {
        for (std::size_t x = 1; x + 1 < img.width(); ++x) {
            const double xc = img(y, x);
            double diff = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (dy || dx) diff += img(y + dy, x + dx) - xc;
            const double xi = std::atan(diff / std::max(xc, kMinCenter));
            const double u = (xi / kPi + 0.5) * p.M;  // in [0, M]
            const auto seg = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(u))), p.M - 1);
            const auto sub = std::min<std::size_t>(
                static_cast<std::size_t>(std::max(0.0, std::floor((u - static_cast<double>(seg)) * p.S))), p.S - 1);

            double theta = std::atan2(img(y + 1, x) - img(y - 1, x), img(y, x + 1) - img(y, x - 1));
            if (theta < 0) theta += 2 * kPi;
            const auto t = static_cast<std::size_t>(std::floor(theta / (2 * kPi / p.T) + 0.5)) % p.T;
            ++counts[(seg * p.T + t) * p.S + sub];
        }
    }
    h.bins.assign(counts.begin(), counts.end());
    h.normalize();
    return h;
}

//----------------------------------------------------------------------------//
// Extraction
//----------------------------------------------------------------------------//

inline Histogram extract(const GrayImage& img, const DescriptorConfig& cfg) {
    cfg.validate();
    switch (cfg.family) {
        case Family::Lbp: return build_histogram(clbp_codes(img, cfg.spec), Scheme::S, cfg.tag());
        case Family::Clbp: return build_histogram(clbp_codes(img, cfg.spec), cfg.scheme, cfg.tag());
        case Family::Clbc: return build_histogram(clbc_codes(img, cfg.spec), cfg.scheme, cfg.tag());
        case Family::Ltp: return build_histogram(ltp_codes(img, cfg.spec, cfg.ltp_t), Scheme::S_M, cfg.tag());
        case Family::Wld: return wld_histogram(img, cfg.wld);
    }
    throw ContractViolation("extract: unknown descriptor family");
}

/// ON and OFF histograms concatenated (ON first) and renormalized to unit sum.
inline Histogram extract(const BfMaps& maps, const DescriptorConfig& cfg) {
    Histogram on = extract(maps.plus, cfg);
    const Histogram off = extract(maps.minus, cfg);
    on.bins.insert(on.bins.end(), off.bins.begin(), off.bins.end());
    on.dims.push_back(2);
    on.normalize();
    return on;
}

inline Histogram extract(const Preprocessed& input, const DescriptorConfig& cfg) {
    return std::visit([&](const auto& x) { return extract(x, cfg); }, input);
}

} // namespace bftex

#endif // BFTEX_DESCRIPTORS_HPP_
