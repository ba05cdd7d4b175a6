#ifndef BFTEX_HARNESS_HPP_
#define BFTEX_HARNESS_HPP_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "imaging.hpp"
#include "random.hpp"

namespace bftex {

/// Receives non-fatal diagnostics (constant image under noise injection,
/// skipped sweep points, ...). Defaults to stderr.
inline std::function<void(std::string_view)>& warning_handler() {
    static std::function<void(std::string_view)> handler = [](std::string_view msg) {
        std::cerr << "warning: " << msg << "\n";
    };
    return handler;
}

inline void warn(std::string_view msg) {
    if (warning_handler()) warning_handler()(msg);
}

//----------------------------------------------------------------------------//
// Manifest
//----------------------------------------------------------------------------//

enum class SplitFlag { None, Train, Test };

struct Sample {
    std::filesystem::path path;  // as resolved against the manifest directory
    std::uint32_t label = 0;
    SplitFlag flag = SplitFlag::None;
    std::size_t line = 0;  // source line, 0 for generated samples
};

struct Manifest {
    std::string suite;
    std::vector<Sample> samples;

    bool has_predefined_split() const {
        return !samples.empty() && samples.front().flag != SplitFlag::None;
    }

    /// Sample ids grouped by class, classes ascending, ids in manifest order.
    std::map<std::uint32_t, std::vector<std::size_t>> classes() const {
        std::map<std::uint32_t, std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < samples.size(); ++i) out[samples[i].label].push_back(i);
        return out;
    }

    void validate() const {
        if (classes().size() < 2) throw ConfigError("manifest '" + suite + "' needs at least 2 classes");
        std::set<std::filesystem::path> seen;
        for (const auto& s : samples)
            if (!seen.insert(s.path).second) throw ConfigError("manifest: duplicate path " + s.path.string());
    }
};

/// Parses `<relative-path> <label> [train|test]` lines; '#' starts a comment.
/// Paths are resolved against `base_dir`. Either every line carries a split
/// flag or none does.
inline Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {},
                               std::string suite = "manifest") {
    Manifest m;
    m.suite = std::move(suite);
    std::set<std::string> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::vector<std::string_view> fields;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            if (j > i) fields.push_back(line.substr(i, j - i));
            i = j;
        }
        if (fields.empty()) continue;
        auto fail = [&](const std::string& why) -> ParseError {
            return ParseError("manifest line " + std::to_string(line_no) + ": " + why, line_no, true);
        };
        if (fields.size() < 2 || fields.size() > 3) throw fail("expected '<path> <label> [train|test]'");

        Sample s;
        s.line = line_no;
        const std::string_view lab = fields[1];
        if (lab.empty() || !std::all_of(lab.begin(), lab.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw fail("label '" + std::string(lab) + "' is not a non-negative integer");
        unsigned long long v = 0;
        for (char c : lab) {
            v = v * 10 + static_cast<unsigned>(c - '0');
            if (v > 0xFFFFFFFFull) throw fail("label out of range");
        }
        s.label = static_cast<std::uint32_t>(v);
        if (fields.size() == 3) {
            if (fields[2] == "train") s.flag = SplitFlag::Train;
            else if (fields[2] == "test") s.flag = SplitFlag::Test;
            else throw fail("split flag must be 'train' or 'test'");
        }
        if (!m.samples.empty() && (m.samples.front().flag == SplitFlag::None) != (s.flag == SplitFlag::None))
            throw fail("split flags must be given on every line or on none");
        if (!seen.insert(std::string(fields[0])).second) throw fail("duplicate path '" + std::string(fields[0]) + "'");
        s.path = base_dir.empty() ? std::filesystem::path(fields[0]) : base_dir / std::filesystem::path(fields[0]);
        m.samples.push_back(std::move(s));
    }
    if (m.samples.empty()) throw ParseError("manifest: no samples", line_no, true);
    return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    try {
        return parse_manifest(text, path.parent_path(), path.stem().string());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset(), true);
    }
}

/// Verifies every sample file exists.
inline void resolve_files(const Manifest& m) {
    for (const auto& s : m.samples)
        if (!std::filesystem::exists(s.path))
            throw ParseError("manifest line " + std::to_string(s.line) + ": missing file " + s.path.string(), s.line,
                             true);
}

//----------------------------------------------------------------------------//
// Splits
//----------------------------------------------------------------------------//

enum class SplitMode { Predefined, RandomPerClass };

struct SplitPolicy {
    SplitMode mode = SplitMode::RandomPerClass;
    std::size_t n_train = 1;
    std::size_t repeats = 1;
    std::uint64_t seed = 0;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    friend bool operator==(const Split&, const Split&) = default;
};

/// Random mode: per repeat, n_train samples of every class are drawn without
/// replacement from the stream (seed, repeat); the rest are test. Ids ascend.
inline std::vector<Split> make_splits(const Manifest& m, const SplitPolicy& p) {
    std::vector<Split> out;
    if (p.mode == SplitMode::Predefined) {
        if (!m.has_predefined_split()) throw ConfigError("manifest has no train/test flags", "split");
        Split s;
        for (std::size_t i = 0; i < m.samples.size(); ++i)
            (m.samples[i].flag == SplitFlag::Train ? s.train : s.test).push_back(i);
        if (s.train.empty() || s.test.empty()) throw ConfigError("predefined split has an empty side", "split");
        out.push_back(std::move(s));
        return out;
    }
    if (p.repeats == 0) throw ConfigError("repeats must be >= 1", "repeats");
    if (p.n_train == 0) throw ConfigError("n_train must be >= 1 (empty training set)", "n_train");
    const auto classes = m.classes();
    for (const auto& [label, ids] : classes)
        if (p.n_train >= ids.size())
            throw ConfigError("n_train=" + std::to_string(p.n_train) + " leaves no test sample for class " +
                                  std::to_string(label) + " (" + std::to_string(ids.size()) + " samples)",
                              "n_train");
    const CounterRng root(p.seed);
    for (std::size_t r = 0; r < p.repeats; ++r) {
        CounterRng rng = root.derive(r);
        Split s;
        for (const auto& [label, ids] : classes) {
            std::vector<std::size_t> pool = ids;
            for (std::size_t k = 0; k < p.n_train; ++k) {
                const std::size_t j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
                std::swap(pool[k], pool[j]);
            }
            s.train.insert(s.train.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(p.n_train));
            s.test.insert(s.test.end(), pool.begin() + static_cast<std::ptrdiff_t>(p.n_train), pool.end());
        }
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.test.begin(), s.test.end());
        out.push_back(std::move(s));
    }
    return out;
}

//----------------------------------------------------------------------------//
// Noise
//----------------------------------------------------------------------------//

struct NoiseSpec {
    std::vector<double> snr_levels;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
    bool corrupt_training = false;

    void validate() const {
        for (double s : snr_levels)
            if (!(s > 0.0)) throw ConfigError("snr values must be > 0", "snr");
        if (!snr_levels.empty() && repeats == 0) throw ConfigError("noise_repeats must be >= 1", "noise_repeats");
    }
};

/// Adds N(0, (std(img)/snr)^2) to every pixel (amplitude SNR, no clipping).
/// A constant image is returned unchanged with a warning.
inline GrayImage add_gaussian_noise(const GrayImage& img, double snr, CounterRng& rng) {
    if (!(snr > 0.0)) throw DomainError("add_gaussian_noise: snr must be > 0");
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    if (*lo == *hi) {
        warn("add_gaussian_noise: constant image, no noise added");
        return img;
    }
    const double sigma_noise = stddev(img) / snr;
    GrayImage out = img;
    for (double& v : out.pixels()) v += sigma_noise * rng.normal();
    return out;
}

} // namespace bftex

#endif // BFTEX_HARNESS_HPP_
