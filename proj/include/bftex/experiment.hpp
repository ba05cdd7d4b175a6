#ifndef BFTEX_EXPERIMENT_HPP_
#define BFTEX_EXPERIMENT_HPP_

#include <charconv>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "classifier.hpp"
#include "descriptors.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "imaging.hpp"
#include "parallel.hpp"
#include "preproc_baselines.hpp"
#include "random.hpp"
#include "synthetic.hpp"

namespace bftex {

//----------------------------------------------------------------------------//
// Flat key = value configuration files
//----------------------------------------------------------------------------//

/// `key = value` lines, '#' comments. Every lookup marks the key as used so
/// that leftovers can be reported as unknown keys.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text) {
        KeyValueConfig cfg;
        std::size_t line_no = 0;
        while (!text.empty()) {
            auto nl = text.find('\n');
            std::string_view line = text.substr(0, nl);
            text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'", line_no, true);
            std::string key(trim(line.substr(0, eq)));
            if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key", line_no, true);
            if (cfg.values_.count(key))
                throw ParseError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'", line_no,
                                 true);
            cfg.values_[key] = std::string(trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    static KeyValueConfig load(const std::filesystem::path& path) {
        try {
            return parse(detail::read_file(path));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": " + e.what(), e.offset(), true);
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }

    std::string get_string(const std::string& key, std::string fallback) const {
        return get(key).value_or(std::move(fallback));
    }

    double get_double(const std::string& key, double fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        try {
            return parse_double(*v, 0);
        } catch (const ParseError&) {
            throw ConfigError("key '" + key + "': '" + *v + "' is not a number", key);
        }
    }

    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        std::uint64_t out = 0;
        auto res = std::from_chars(v->data(), v->data() + v->size(), out);
        if (res.ec != std::errc() || res.ptr != v->data() + v->size() || v->empty())
            throw ConfigError("key '" + key + "': '" + *v + "' is not a non-negative integer", key);
        return out;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
        if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
        throw ConfigError("key '" + key + "': '" + *v + "' is not a boolean", key);
    }

    /// Comma-separated list; empty entries are dropped.
    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        auto v = get(key);
        if (!v) return out;
        std::string_view rest = *v;
        while (true) {
            auto comma = rest.find(',');
            auto item = trim(rest.substr(0, comma));
            if (!item.empty()) out.emplace_back(item);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return out;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& item : get_list(key)) {
            try {
                out.push_back(parse_double(item, 0));
            } catch (const ParseError&) {
                throw ConfigError("key '" + key + "': '" + item + "' is not a number", key);
            }
        }
        return out;
    }

    /// Throws on the first key never looked up.
    void reject_unknown() const {
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) throw ConfigError("unknown configuration key '" + k + "'", k);
    }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

//----------------------------------------------------------------------------//
// Experiment configuration
//----------------------------------------------------------------------------//

struct ExperimentConfig {
    std::string suite;
    std::filesystem::path manifest;           // empty when synthetic is set
    std::optional<SyntheticSpec> synthetic;
    std::vector<PreprocConfig> preprocessors{PreprocConfig{Preprocessor::None}, PreprocConfig{Preprocessor::Bf}};
    std::vector<DescriptorConfig> descriptors{DescriptorConfig{}};
    SplitPolicy split{SplitMode::RandomPerClass, 10, 20, 1};
    NoiseSpec noise{};
    bool include_clean = true;
    bool timing = false;  // off keeps reports byte-reproducible
    unsigned threads = 0;
};

/// Builds an ExperimentConfig from parsed keys. Relative paths resolve
/// against `base_dir` (the config file's directory).
inline ExperimentConfig parse_experiment_config(const KeyValueConfig& kv, const std::filesystem::path& base_dir = {}) {
    ExperimentConfig cfg;
    const bool synthetic = kv.get_bool("synthetic", false);
    if (auto m = kv.get("manifest")) {
        if (synthetic) throw ConfigError("'manifest' and 'synthetic = true' are mutually exclusive", "manifest");
        std::filesystem::path p(*m);
        cfg.manifest = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        cfg.suite = kv.get_string("suite", cfg.manifest.stem().string());
    } else if (synthetic) {
        SyntheticSpec s;
        s.classes = kv.get_uint("synthetic.classes", s.classes);
        s.per_class = kv.get_uint("synthetic.per_class", s.per_class);
        s.size = kv.get_uint("synthetic.size", s.size);
        s.seed = kv.get_uint("synthetic.seed", s.seed);
        s.sensor_noise = kv.get_double("synthetic.sensor_noise", s.sensor_noise);
        s.gain_min = kv.get_double("synthetic.gain_min", s.gain_min);
        s.gain_max = kv.get_double("synthetic.gain_max", s.gain_max);
        s.validate();
        cfg.synthetic = s;
        cfg.suite = kv.get_string("suite", "synthetic");
    } else {
        throw ConfigError("missing 'manifest' (or 'synthetic = true')", "manifest");
    }

    BfParams bf;
    bf.sigma1 = kv.get_double("sigma1", bf.sigma1);
    bf.sigma2 = kv.get_double("sigma2", bf.sigma2);
    bf.epsilon = kv.get_double("epsilon", bf.epsilon);
    const double gamma = kv.get_double("gamma", 0.5);
    const double gderiv_sigma = kv.get_double("gderiv_sigma", 1.0);
    const double ltp_t = kv.get_double("ltp_t", 5.0 / 255.0);

    if (kv.has("preprocessors")) {
        cfg.preprocessors.clear();
        for (const auto& name : kv.get_list("preprocessors")) {
            auto kind = parse_preprocessor(name);
            if (!kind) throw ConfigError("unknown preprocessor '" + name + "'", "preprocessors");
            cfg.preprocessors.push_back({*kind, bf, gamma, gderiv_sigma});
        }
        if (cfg.preprocessors.empty()) throw ConfigError("empty preprocessor list", "preprocessors");
    } else {
        for (auto& p : cfg.preprocessors) p = {p.kind, bf, gamma, gderiv_sigma};
    }
    for (const auto& p : cfg.preprocessors) {
        try {
            if (p.kind == Preprocessor::Bf || p.kind == Preprocessor::Dog) p.bf.validate();
            if (p.kind == Preprocessor::Gamma && !(p.gamma > 0)) throw DomainError("gamma must be > 0");
            if (!(p.gderiv_sigma > 0)) throw DomainError("gderiv_sigma must be > 0");
        } catch (const DomainError& e) {
            throw ConfigError(e.what(), p.kind == Preprocessor::Gamma ? "gamma" : "sigma1");
        }
    }

    if (kv.has("descriptors")) {
        cfg.descriptors.clear();
        for (const auto& text : kv.get_list("descriptors")) {
            DescriptorConfig d;
            try {
                d = parse_descriptor(text);
            } catch (const Error& e) {
                throw ConfigError("descriptor '" + text + "': " + e.what(), "descriptors");
            }
            d.ltp_t = ltp_t;
            cfg.descriptors.push_back(d);
        }
        if (cfg.descriptors.empty()) throw ConfigError("empty descriptor list", "descriptors");
    }

    const std::string mode = kv.get_string("split", "random");
    if (mode == "random") cfg.split.mode = SplitMode::RandomPerClass;
    else if (mode == "predefined") cfg.split.mode = SplitMode::Predefined;
    else throw ConfigError("split must be 'random' or 'predefined'", "split");
    cfg.split.n_train = kv.get_uint("n_train", cfg.split.n_train);
    cfg.split.repeats = kv.get_uint("repeats", cfg.split.repeats);
    cfg.split.seed = kv.get_uint("seed", cfg.split.seed);
    if (cfg.split.mode == SplitMode::RandomPerClass) {
        if (cfg.split.repeats == 0) throw ConfigError("repeats must be >= 1", "repeats");
        if (cfg.split.n_train == 0) throw ConfigError("n_train must be >= 1", "n_train");
    }

    cfg.noise.snr_levels = kv.get_double_list("snr");
    cfg.noise.repeats = kv.get_uint("noise_repeats", cfg.noise.repeats);
    cfg.noise.seed = kv.get_uint("noise_seed", cfg.split.seed);
    cfg.noise.corrupt_training = kv.get_bool("noise_train", false);
    cfg.noise.validate();
    cfg.include_clean = kv.get_bool("include_clean", true);
    if (!cfg.include_clean && cfg.noise.snr_levels.empty())
        throw ConfigError("include_clean = false requires snr levels", "include_clean");
    cfg.timing = kv.get_bool("timing", false);
    cfg.threads = static_cast<unsigned>(kv.get_uint("threads", 0));
    return cfg;
}

//----------------------------------------------------------------------------//
// Report
//----------------------------------------------------------------------------//

struct ReportRow {
    std::string suite;
    PreprocConfig preproc;
    DescriptorConfig descriptor;
    std::string condition;  // "clean" or "snr=<value>"
    double mean_accuracy = 0;
    std::optional<double> std_accuracy;  // present iff more than one evaluation
    std::size_t evaluations = 0;
    std::size_t feature_size = 0;
    std::optional<double> extract_ms;
    std::optional<double> match_ms;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;

    bool any_failed() const {
        for (const auto& r : rows)
            if (!r.ok()) return true;
        return false;
    }
};

inline constexpr std::string_view kReportHeader =
    "suite,preprocessor,sigma1,sigma2,epsilon,preproc_param,descriptor,P,R,condition,mean_accuracy,std_accuracy,"
    "evaluations,feature_size,extract_ms,match_ms,status";

namespace detail {

inline std::string csv_field(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

} // namespace detail

inline std::string format_report_csv(const ExperimentReport& report) {
    std::string out(kReportHeader);
    out += '\n';
    for (const auto& r : report.rows) {
        const auto k = r.preproc.kind;
        out += detail::csv_field(r.suite) + "," + std::string(to_string(k)) + ",";
        if (k == Preprocessor::Bf || k == Preprocessor::Dog) {
            append_double(out, r.preproc.bf.sigma1);
            out += ',';
            append_double(out, r.preproc.bf.sigma2);
            out += ',';
            if (k == Preprocessor::Bf) append_double(out, r.preproc.bf.epsilon);
        } else {
            out += ",,";
        }
        out += ',';
        if (k == Preprocessor::Gamma) append_double(out, r.preproc.gamma);
        if (k == Preprocessor::GDeriv0 || k == Preprocessor::GDeriv1 || k == Preprocessor::GDeriv2)
            append_double(out, r.preproc.gderiv_sigma);
        out += "," + r.descriptor.tag() + ",";
        if (r.descriptor.family != Family::Wld) {
            out += std::to_string(r.descriptor.spec.P) + ",";
            append_double(out, r.descriptor.spec.R);
        } else {
            out += ",";
        }
        out += "," + r.condition + ",";
        if (r.ok()) append_fixed(out, r.mean_accuracy, 6);
        out += ',';
        if (r.ok() && r.std_accuracy) append_fixed(out, *r.std_accuracy, 6);
        out += "," + std::to_string(r.evaluations) + "," + std::to_string(r.feature_size) + ",";
        if (r.extract_ms) append_fixed(out, *r.extract_ms, 4);
        out += ',';
        if (r.match_ms) append_fixed(out, *r.match_ms, 4);
        out += "," + detail::csv_field(r.status) + "\n";
    }
    return out;
}

inline void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    detail::write_file(path, format_report_csv(report));
}

/// Human-readable table for the terminal.
inline std::string format_summary(const ExperimentReport& report) {
    std::ostringstream os;
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    os << pad("preproc", 10) << pad("descriptor", 16) << pad("P,R", 8) << pad("condition", 11) << pad("accuracy", 10)
       << pad("std", 9) << pad("size", 7) << "status\n";
    for (const auto& r : report.rows) {
        std::string pre(to_string(r.preproc.kind)), pr, acc, sd;
        if (r.descriptor.family != Family::Wld) {
            pr = std::to_string(r.descriptor.spec.P) + ",";
            append_double(pr, r.descriptor.spec.R);
        }
        if (r.ok()) append_fixed(acc, 100.0 * r.mean_accuracy, 2);
        if (r.ok() && r.std_accuracy) append_fixed(sd, 100.0 * *r.std_accuracy, 2);
        os << pad(pre, 10) << pad(r.descriptor.tag(), 16) << pad(pr, 8) << pad(r.condition, 11) << pad(acc, 10)
           << pad(sd, 9) << pad(std::to_string(r.feature_size), 7) << r.status << "\n";
    }
    return os.str();
}

//----------------------------------------------------------------------------//
// Running experiments
//----------------------------------------------------------------------------//

struct Dataset {
    Manifest manifest;
    std::vector<GrayImage> images;
};

inline Dataset load_dataset(const ExperimentConfig& cfg) {
    if (cfg.synthetic) {
        SyntheticSuite s = make_synthetic_suite(*cfg.synthetic);
        s.manifest.suite = cfg.suite;
        return {std::move(s.manifest), std::move(s.images)};
    }
    if (!std::filesystem::exists(cfg.manifest))
        throw ConfigError("manifest file not found: " + cfg.manifest.string(), "manifest");
    Dataset d{load_manifest(cfg.manifest), {}};
    d.manifest.suite = cfg.suite;
    d.manifest.validate();
    resolve_files(d.manifest);
    d.images.reserve(d.manifest.samples.size());
    for (const auto& s : d.manifest.samples) d.images.push_back(load_image(s.path));
    return d;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Features of every image for one preprocessor and all descriptors.
struct FeatureTable {
    std::vector<std::vector<Histogram>> by_descriptor;  // [descriptor][sample]
    std::vector<std::string> errors;                    // per descriptor, empty if fine
    std::vector<double> extract_ms;                     // per descriptor, mean per image
};

inline FeatureTable compute_features(const std::vector<GrayImage>& images, const std::vector<std::size_t>& ids,
                                     const PreprocConfig& pre, const std::vector<DescriptorConfig>& descriptors,
                                     unsigned threads, bool timing,
                                     const std::function<GrayImage(std::size_t)>& source = {}) {
    const std::size_t nd = descriptors.size(), n = images.size();
    FeatureTable t;
    t.by_descriptor.assign(nd, std::vector<Histogram>(n));
    t.errors.assign(nd, {});
    t.extract_ms.assign(nd, 0.0);
    std::vector<std::vector<std::string>> err(ids.size(), std::vector<std::string>(nd));
    std::vector<std::vector<double>> ms(ids.size(), std::vector<double>(nd, 0.0));
    parallel_for(ids.size(), threads, [&](std::size_t k) {
        const std::size_t i = ids[k];
        auto t0 = Clock::now();
        std::optional<Preprocessed> p;
        try {
            p = preprocess(source ? source(i) : images[i], pre);
        } catch (const std::exception& e) {
            for (auto& s : err[k]) s = std::string("preprocess: ") + e.what();
            return;
        }
        const double pre_ms = timing ? ms_since(t0) : 0.0;
        for (std::size_t d = 0; d < nd; ++d) {
            auto t1 = Clock::now();
            try {
                t.by_descriptor[d][i] = extract(*p, descriptors[d]);
            } catch (const std::exception& e) {
                err[k][d] = e.what();
            }
            if (timing) ms[k][d] = pre_ms + ms_since(t1);
        }
    });
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (t.errors[d].empty() && !err[k][d].empty())
                t.errors[d] = "sample " + std::to_string(ids[k]) + ": " + err[k][d];
            t.extract_ms[d] += ms[k][d];
        }
        if (!ids.empty()) t.extract_ms[d] /= static_cast<double>(ids.size());
    }
    return t;
}

inline ReferenceSet make_refs(const std::vector<Histogram>& features, const Manifest& m,
                              const std::vector<std::size_t>& ids) {
    ReferenceSet refs;
    for (auto i : ids) refs.add(features[i], m.samples[i].label);
    return refs;
}

inline std::vector<LabeledHistogram> make_queries(const std::vector<Histogram>& features, const Manifest& m,
                                                  const std::vector<std::size_t>& ids) {
    std::vector<LabeledHistogram> q;
    q.reserve(ids.size());
    for (auto i : ids) q.push_back({features[i], m.samples[i].label});
    return q;
}

inline void aggregate(ReportRow& row, const std::vector<double>& acc) {
    row.evaluations = acc.size();
    double s = 0;
    for (double a : acc) s += a;
    row.mean_accuracy = s / static_cast<double>(acc.size());
    if (acc.size() > 1) {
        double v = 0;
        for (double a : acc) v += (a - row.mean_accuracy) * (a - row.mean_accuracy);
        row.std_accuracy = std::sqrt(v / static_cast<double>(acc.size() - 1));
    }
}

inline std::string snr_condition(double snr) {
    std::string s = "snr=";
    append_double(s, snr);
    return s;
}

} // namespace detail

/// Evaluates every (preprocessor x descriptor x condition) combination on the
/// given dataset and splits. Noise is applied to test images only unless
/// `noise.corrupt_training`; the noise of sample i in repeat r is derived from
/// (noise.seed, r, i) and shared across SNR levels.
inline ExperimentReport run_rows(const Dataset& data, const std::vector<Split>& splits, const ExperimentConfig& cfg,
                                 const std::vector<PreprocConfig>& preprocessors) {
    ExperimentReport report;
    const auto& m = data.manifest;
    std::vector<std::size_t> all(data.images.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<char> is_test(all.size(), 0);
    for (const auto& s : splits)
        for (auto i : s.test) is_test[i] = 1;
    std::vector<std::size_t> noisy_ids;
    for (auto i : all)
        if (cfg.noise.corrupt_training || is_test[i]) noisy_ids.push_back(i);

    for (const auto& pre : preprocessors) {
        const detail::FeatureTable clean =
            detail::compute_features(data.images, all, pre, cfg.descriptors, cfg.threads, cfg.timing);

        auto base_row = [&](std::size_t d, std::string condition) {
            ReportRow row;
            row.suite = cfg.suite;
            row.preproc = pre;
            row.descriptor = cfg.descriptors[d];
            row.condition = std::move(condition);
            row.feature_size = feature_size(cfg.descriptors[d], pre.kind == Preprocessor::Bf);
            return row;
        };

        if (cfg.include_clean) {
            for (std::size_t d = 0; d < cfg.descriptors.size(); ++d) {
                ReportRow row = base_row(d, "clean");
                if (!clean.errors[d].empty()) {
                    row.status = "error: " + clean.errors[d];
                    report.rows.push_back(std::move(row));
                    continue;
                }
                std::vector<double> acc(splits.size());
                std::vector<double> match_ms(splits.size());
                std::vector<std::size_t> n_queries(splits.size());
                try {
                    parallel_for(splits.size(), cfg.threads, [&](std::size_t s) {
                        const auto refs = detail::make_refs(clean.by_descriptor[d], m, splits[s].train);
                        const auto queries = detail::make_queries(clean.by_descriptor[d], m, splits[s].test);
                        auto t0 = detail::Clock::now();
                        acc[s] = evaluate(queries, refs).accuracy;
                        match_ms[s] = cfg.timing ? detail::ms_since(t0) : 0.0;
                        n_queries[s] = queries.size();
                    });
                    detail::aggregate(row, acc);
                    if (cfg.timing) {
                        double total = 0;
                        std::size_t nq = 0;
                        for (std::size_t s = 0; s < splits.size(); ++s) total += match_ms[s], nq += n_queries[s];
                        row.extract_ms = clean.extract_ms[d];
                        row.match_ms = total / static_cast<double>(nq);
                    }
                } catch (const std::exception& e) {
                    row.status = std::string("error: ") + e.what();
                }
                report.rows.push_back(std::move(row));
            }
        }

        if (cfg.noise.snr_levels.empty()) continue;
        // acc[level][descriptor] collects splits x noise repeats
        std::vector<std::vector<std::vector<double>>> acc(
            cfg.noise.snr_levels.size(), std::vector<std::vector<double>>(cfg.descriptors.size()));
        std::vector<std::vector<std::string>> errors(cfg.noise.snr_levels.size(),
                                                     std::vector<std::string>(cfg.descriptors.size()));
        const CounterRng noise_root(cfg.noise.seed);
        for (std::size_t lvl = 0; lvl < cfg.noise.snr_levels.size(); ++lvl) {
            const double snr = cfg.noise.snr_levels[lvl];
            for (std::size_t r = 0; r < cfg.noise.repeats; ++r) {
                const CounterRng rep = noise_root.derive(r);
                auto noisy_source = [&](std::size_t i) {
                    CounterRng rng = rep.derive(i);
                    return add_gaussian_noise(data.images[i], snr, rng);
                };
                const detail::FeatureTable noisy = detail::compute_features(
                    data.images, noisy_ids, pre, cfg.descriptors, cfg.threads, false, noisy_source);
                for (std::size_t d = 0; d < cfg.descriptors.size(); ++d) {
                    if (!clean.errors[d].empty() || !noisy.errors[d].empty()) {
                        if (errors[lvl][d].empty())
                            errors[lvl][d] = !clean.errors[d].empty() ? clean.errors[d] : noisy.errors[d];
                        continue;
                    }
                    const auto& train_features =
                        cfg.noise.corrupt_training ? noisy.by_descriptor[d] : clean.by_descriptor[d];
                    std::vector<double> split_acc(splits.size());
                    try {
                        parallel_for(splits.size(), cfg.threads, [&](std::size_t s) {
                            const auto refs = detail::make_refs(train_features, m, splits[s].train);
                            const auto queries = detail::make_queries(noisy.by_descriptor[d], m, splits[s].test);
                            split_acc[s] = evaluate(queries, refs).accuracy;
                        });
                    } catch (const std::exception& e) {
                        if (errors[lvl][d].empty()) errors[lvl][d] = e.what();
                        continue;
                    }
                    acc[lvl][d].insert(acc[lvl][d].end(), split_acc.begin(), split_acc.end());
                }
            }
        }
        for (std::size_t lvl = 0; lvl < cfg.noise.snr_levels.size(); ++lvl) {
            for (std::size_t d = 0; d < cfg.descriptors.size(); ++d) {
                ReportRow row = base_row(d, detail::snr_condition(cfg.noise.snr_levels[lvl]));
                if (!errors[lvl][d].empty()) row.status = "error: " + errors[lvl][d];
                else detail::aggregate(row, acc[lvl][d]);
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

/// Loads the data, draws the splits and runs every configured row. Dataset
/// and split errors are configuration errors; per-row failures are recorded
/// in the row status.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const Dataset data = load_dataset(cfg);
    return run_rows(data, make_splits(data.manifest, cfg.split), cfg, cfg.preprocessors);
}

//----------------------------------------------------------------------------//
// BF parameter sweeps
//----------------------------------------------------------------------------//

struct SweepGrid {
    std::vector<double> sigma1{0.5, 0.75, 1.0, 1.25, 1.5};
    std::vector<double> sigma2{2, 3, 4, 5, 6};
    std::vector<double> epsilon{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
};

inline SweepGrid parse_sweep_grid(const KeyValueConfig& kv) {
    SweepGrid g;
    if (kv.has("sigma1")) g.sigma1 = kv.get_double_list("sigma1");
    if (kv.has("sigma2")) g.sigma2 = kv.get_double_list("sigma2");
    if (kv.has("epsilon")) g.epsilon = kv.get_double_list("epsilon");
    kv.reject_unknown();
    return g;
}

/// Valid (sigma1, sigma2, epsilon) triples in grid order; invalid ones are
/// described in `skipped`.
inline std::vector<BfParams> expand_grid(const SweepGrid& grid, std::vector<std::string>* skipped = nullptr) {
    std::vector<BfParams> out;
    for (double s1 : grid.sigma1) {
        for (double s2 : grid.sigma2) {
            for (double eps : grid.epsilon) {
                BfParams p{s1, s2, eps};
                try {
                    p.validate();
                    out.push_back(p);
                } catch (const DomainError& e) {
                    if (skipped) skipped->push_back(e.what());
                }
            }
        }
    }
    return out;
}

inline ExperimentReport sweep_bf_params(const ExperimentConfig& cfg, const SweepGrid& grid) {
    std::vector<std::string> skipped;
    const auto triples = expand_grid(grid, &skipped);
    if (triples.empty()) throw ConfigError("sweep grid contains no valid sigma1 < sigma2 combination", "sigma1");
    std::vector<PreprocConfig> pre;
    for (const auto& p : triples) pre.push_back({Preprocessor::Bf, p, 0.5, 1.0});
    const Dataset data = load_dataset(cfg);
    ExperimentReport report = run_rows(data, make_splits(data.manifest, cfg.split), cfg, pre);
    for (auto& s : skipped) report.notes.push_back("skipped: " + s);
    return report;
}

/// Mean accuracy over epsilon for each (sigma1, sigma2, descriptor, condition).
inline std::string format_epsilon_average_csv(const ExperimentReport& report) {
    struct Acc {
        double sum = 0;
        std::size_t n = 0;
    };
    std::vector<std::pair<std::string, Acc>> groups;  // first-seen order
    std::map<std::string, std::size_t> index;
    for (const auto& r : report.rows) {
        if (!r.ok() || r.preproc.kind != Preprocessor::Bf) continue;
        std::string key = detail::csv_field(r.suite) + ",";
        append_double(key, r.preproc.bf.sigma1);
        key += ',';
        append_double(key, r.preproc.bf.sigma2);
        key += "," + r.descriptor.tag() + ",";
        if (r.descriptor.family != Family::Wld) {
            key += std::to_string(r.descriptor.spec.P) + ",";
            append_double(key, r.descriptor.spec.R);
        } else {
            key += ",";
        }
        key += "," + r.condition;
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) groups.push_back({key, {}});
        groups[it->second].second.sum += r.mean_accuracy;
        ++groups[it->second].second.n;
    }
    std::string out = "suite,sigma1,sigma2,descriptor,P,R,condition,mean_accuracy,epsilon_count\n";
    for (const auto& [key, a] : groups) {
        out += key + ",";
        append_fixed(out, a.sum / static_cast<double>(a.n), 6);
        out += "," + std::to_string(a.n) + "\n";
    }
    return out;
}

//----------------------------------------------------------------------------//
// Feature tables (extract / classify subcommands)
//----------------------------------------------------------------------------//

struct FeatureRow {
    std::string id;
    std::uint32_t label = 0;
    Histogram histogram;
};

/// `id,label,descriptor,b0,...,b{n-1}` with a header line; bins in shortest
/// round-trip form so a reload is exact.
inline std::string format_feature_csv(const std::vector<FeatureRow>& rows) {
    std::string out = "id,label,descriptor";
    const std::size_t n = rows.empty() ? 0 : rows.front().histogram.size();
    for (std::size_t i = 0; i < n; ++i) out += ",b" + std::to_string(i);
    out += '\n';
    for (const auto& r : rows) {
        out += detail::csv_field(r.id) + "," + std::to_string(r.label) + "," + r.histogram.scheme;
        for (double b : r.histogram.bins) {
            out += ',';
            append_double(out, b);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<FeatureRow> parse_feature_csv(std::string_view text) {
    std::vector<FeatureRow> rows;
    std::size_t line_no = 0;
    bool header = true;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.substr(0, 3) == "id,") continue;
        }
        std::vector<std::string_view> f;
        while (true) {
            auto comma = line.find(',');
            f.push_back(line.substr(0, comma));
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        auto fail = [&](const std::string& why) {
            return ParseError("features line " + std::to_string(line_no) + ": " + why, line_no, true);
        };
        if (f.size() < 4) throw fail("expected id,label,descriptor,bins...");
        FeatureRow r;
        r.id = std::string(f[0]);
        auto res = std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.label);
        if (res.ec != std::errc() || res.ptr != f[1].data() + f[1].size() || f[1].empty())
            throw fail("label is not a non-negative integer");
        r.histogram.scheme = std::string(f[2]);
        for (std::size_t i = 3; i < f.size(); ++i) r.histogram.bins.push_back(parse_double(f[i], line_no));
        r.histogram.dims = {r.histogram.bins.size()};
        if (!rows.empty() && rows.front().histogram.size() != r.histogram.size())
            throw fail("row length differs from the first row");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ParseError("features: no rows", line_no, true);
    return rows;
}

} // namespace bftex

#endif // BFTEX_EXPERIMENT_HPP_
