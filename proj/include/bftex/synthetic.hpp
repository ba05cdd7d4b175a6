#ifndef BFTEX_SYNTHETIC_HPP_
#define BFTEX_SYNTHETIC_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "harness.hpp"
#include "imaging.hpp"
#include "random.hpp"

namespace bftex {

/// Desk-scale texture suite. Every image of a class is the class pattern under
/// a random rotation, phase, contrast gain, mean level and illumination ramp,
/// plus sensor noise, quantised to 8 bits.
struct SyntheticSpec {
    std::size_t classes = 10;
    std::size_t per_class = 20;
    std::size_t size = 64;
    std::uint64_t seed = 7;
    double gain_min = 0.45;  // contrast multiplier range
    double gain_max = 1.0;
    double ramp_max = 0.15;  // peak illumination gradient across the image
    double sensor_noise = 0.03;

    void validate() const {
        if (classes < 2) throw ConfigError("synthetic suite needs at least 2 classes", "synthetic.classes");
        if (per_class < 2) throw ConfigError("synthetic suite needs at least 2 images per class", "synthetic.per_class");
        if (size < 16) throw ConfigError("synthetic image size must be >= 16", "synthetic.size");
        if (!(gain_min > 0) || gain_max < gain_min) throw ConfigError("bad synthetic gain range", "synthetic.gain");
    }
};

enum class PatternKind { Grating, Checker, Plaid, Noise, Dots };

/// One class recipe. `period` in pixels; for Noise, the mean wavelength.
struct PatternRecipe {
    PatternKind kind;
    double period;
    double spread = 0.25;         // Noise: relative bandwidth
    double angular_spread = 3.2;  // Noise: orientation spread (radians, >= pi is isotropic)
};

/// Built-in recipes; classes beyond this list reuse them at a scaled period.
inline const std::array<PatternRecipe, 10>& pattern_recipes() {
    static const std::array<PatternRecipe, 10> recipes{{
        {PatternKind::Grating, 7.0},
        {PatternKind::Grating, 12.0},
        {PatternKind::Grating, 18.0},
        {PatternKind::Checker, 8.0},
        {PatternKind::Checker, 14.0},
        {PatternKind::Plaid, 9.0},
        {PatternKind::Noise, 7.0},
        {PatternKind::Noise, 12.0},
        {PatternKind::Noise, 8.0, 0.2, 0.3},
        {PatternKind::Dots, 11.0},
    }};
    return recipes;
}

inline PatternRecipe synthetic_recipe(std::size_t cls) {
    const auto& base = pattern_recipes();
    PatternRecipe r = base[cls % base.size()];
    r.period *= std::pow(1.37, static_cast<double>(cls / base.size()));
    return r;
}

namespace detail {

struct Wave {
    double ku, kv, phase, amp;
};

} // namespace detail

/// Image `index` of class `cls`; a pure function of (spec.seed, cls, index).
inline GrayImage synthetic_image(const SyntheticSpec& spec, std::size_t cls, std::size_t index) {
    constexpr double kTau = 2.0 * std::numbers::pi;
    CounterRng rng = CounterRng(spec.seed).derive(cls).derive(index);
    const PatternRecipe recipe = synthetic_recipe(cls);

    const double rotation = rng.uniform(0.0, kTau);
    const double pu = rng.uniform(0.0, recipe.period), pv = rng.uniform(0.0, recipe.period);
    const double gain = rng.uniform(spec.gain_min, spec.gain_max);
    const double level = rng.uniform(0.4, 0.6);
    const double ramp = rng.uniform(0.0, spec.ramp_max);
    const double ramp_dir = rng.uniform(0.0, kTau);

    // Random-phase spectral synthesis for the Noise kind.
    std::vector<detail::Wave> waves;
    if (recipe.kind == PatternKind::Noise) {
        constexpr int kWaves = 32;
        const double base_angle = rng.uniform(0.0, kTau);
        for (int w = 0; w < kWaves; ++w) {
            const double f = (1.0 + recipe.spread * (2 * rng.uniform() - 1)) / recipe.period;
            const double a = base_angle + recipe.angular_spread * (rng.uniform() - 0.5);
            waves.push_back({kTau * f * std::cos(a), kTau * f * std::sin(a), rng.uniform(0.0, kTau), 1.0});
        }
    }
    const double noise_norm = waves.empty() ? 1.0 : std::sqrt(2.0 / static_cast<double>(waves.size()));

    const double c = std::cos(rotation), s = std::sin(rotation);
    auto pattern = [&](double x, double y) {
        const double u = c * x + s * y + pu, v = -s * x + c * y + pv;
        const double p = recipe.period;
        switch (recipe.kind) {
            case PatternKind::Grating: return std::sin(kTau * u / p);
            case PatternKind::Checker: {
                const double a = std::sin(kTau * u / p) * std::sin(kTau * v / p);
                return a >= 0 ? 1.0 : -1.0;
            }
            case PatternKind::Plaid: return 0.5 * (std::sin(kTau * u / p) + std::sin(kTau * v / p));
            case PatternKind::Noise: {
                double acc = 0;
                for (const auto& w : waves) acc += w.amp * std::cos(w.ku * u + w.kv * v + w.phase);
                return std::clamp(acc * noise_norm, -1.5, 1.5) / 1.5 * 1.2;
            }
            case PatternKind::Dots: {
                const double du = u - p * std::round(u / p), dv = v - p * std::round(v / p);
                const double r = p * 0.22;
                return 2.0 * std::exp(-(du * du + dv * dv) / (2 * r * r)) - 1.0;
            }
        }
        return 0.0;
    };

    const std::size_t n = spec.size;
    GrayImage img(n, n);
    const double half = static_cast<double>(n) / 2.0;
    for (std::size_t yi = 0; yi < n; ++yi) {
        for (std::size_t xi = 0; xi < n; ++xi) {
            // 2x2 supersampling against aliasing of hard edges.
            double acc = 0;
            for (double oy : {-0.25, 0.25})
                for (double ox : {-0.25, 0.25})
                    acc += pattern(static_cast<double>(xi) + ox - half, static_cast<double>(yi) + oy - half);
            const double x = (static_cast<double>(xi) - half) / n, y = (static_cast<double>(yi) - half) / n;
            const double illum = ramp * (std::cos(ramp_dir) * x + std::sin(ramp_dir) * y);
            img(yi, xi) = level + 0.35 * gain * (acc / 4.0) + illum + spec.sensor_noise * rng.normal();
        }
    }
    return quantize8(img);
}

struct SyntheticSuite {
    Manifest manifest;  // paths are synthetic ids "class<c>/img<i>.pgm"
    std::vector<GrayImage> images;
};

inline SyntheticSuite make_synthetic_suite(const SyntheticSpec& spec) {
    spec.validate();
    SyntheticSuite suite;
    suite.manifest.suite = "synthetic";
    for (std::size_t c = 0; c < spec.classes; ++c) {
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            Sample s;
            s.path = "class" + std::to_string(c) + "/img" + std::to_string(i) + ".pgm";
            s.label = static_cast<std::uint32_t>(c);
            suite.manifest.samples.push_back(std::move(s));
            suite.images.push_back(synthetic_image(spec, c, i));
        }
    }
    return suite;
}

/// Writes the suite as PGM files plus `manifest.txt` under `dir`.
inline std::filesystem::path write_synthetic_suite(const SyntheticSpec& spec, const std::filesystem::path& dir) {
    const SyntheticSuite suite = make_synthetic_suite(spec);
    std::string manifest = "# synthetic texture suite: " + std::to_string(spec.classes) + " classes x " +
                           std::to_string(spec.per_class) + " images, " + std::to_string(spec.size) + "px, seed " +
                           std::to_string(spec.seed) + "\n";
    for (std::size_t i = 0; i < suite.images.size(); ++i) {
        const auto& s = suite.manifest.samples[i];
        const auto path = dir / s.path;
        std::filesystem::create_directories(path.parent_path());
        save_pgm(suite.images[i], path);
        manifest += s.path.generic_string() + " " + std::to_string(s.label) + "\n";
    }
    const auto manifest_path = dir / "manifest.txt";
    detail::write_file(manifest_path, manifest);
    return manifest_path;
}

} // namespace bftex

#endif // BFTEX_SYNTHETIC_HPP_
