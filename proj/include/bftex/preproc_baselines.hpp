#ifndef BFTEX_PREPROC_BASELINES_HPP_
#define BFTEX_PREPROC_BASELINES_HPP_

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "errors.hpp"
#include "imaging.hpp"
#include "retina_filter.hpp"

namespace bftex {

/// out = sign(v) |v|^gamma. On the nominal [0,1] range this is plain gamma
/// correction; the odd extension keeps it monotone on noisy inputs.
inline GrayImage gamma_correct(const GrayImage& img, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma_correct: gamma must be > 0");
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = src[i] >= 0.0 ? std::pow(src[i], gamma) : -std::pow(-src[i], gamma);
    return out;
}

/// Plain DoG without the ON/OFF split.
inline GrayImage dog_only(const GrayImage& img, double sigma1, double sigma2) {
    return dog_filter(img, BfParams{sigma1, sigma2, 0.0});
}

/// Sampled first derivative of a Gaussian, scaled so that a unit-slope ramp
/// produces a response of exactly 1.
inline Kernel1D gaussian_derivative_kernel_1d(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("gaussian_derivative_kernel_1d: sigma must be > 0");
    Kernel1D k;
    k.radius = gaussian_radius(sigma);
    const auto r = static_cast<std::ptrdiff_t>(k.radius);
    k.taps.resize(2 * k.radius + 1);
    double moment = 0;
    for (std::ptrdiff_t i = -r; i <= r; ++i) {
        const double x = static_cast<double>(i);
        const double v = -x / (sigma * sigma) * std::exp(-x * x / (2 * sigma * sigma));
        k.taps[static_cast<std::size_t>(i + r)] = v;
        moment -= x * v;
    }
    for (double& t : k.taps) t /= moment;
    return k;
}

/// Sampled second derivative of a Gaussian with zero DC gain and unit response
/// to x^2/2.
inline Kernel1D gaussian_second_derivative_kernel_1d(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("gaussian_second_derivative_kernel_1d: sigma must be > 0");
    const Kernel1D g = gaussian_kernel_1d(sigma);
    Kernel1D k;
    k.radius = g.radius;
    const auto r = static_cast<std::ptrdiff_t>(k.radius);
    k.taps.resize(g.taps.size());
    const double s2 = sigma * sigma;
    double dc = 0;
    for (std::ptrdiff_t i = -r; i <= r; ++i) {
        const double x = static_cast<double>(i);
        const double v = (x * x / (s2 * s2) - 1.0 / s2) * std::exp(-x * x / (2 * s2));
        k.taps[static_cast<std::size_t>(i + r)] = v;
        dc += v;
    }
    // Remove the residual DC with a multiple of the (unit-sum) Gaussian.
    for (std::size_t t = 0; t < k.taps.size(); ++t) k.taps[t] -= dc * g.taps[t];
    double moment = 0;
    for (std::ptrdiff_t i = -r; i <= r; ++i) {
        const double x = static_cast<double>(i);
        moment += 0.5 * x * x * k.taps[static_cast<std::size_t>(i + r)];
    }
    for (double& t : k.taps) t /= moment;
    return k;
}

/// order 0: Gaussian blur; order 1: gradient magnitude sqrt(Gx^2 + Gy^2);
/// order 2: Laplacian of Gaussian Gxx + Gyy.
inline GrayImage gaussian_derivative(const GrayImage& img, double sigma, int order) {
    if (!(sigma > 0.0)) throw DomainError("gaussian_derivative: sigma must be > 0");
    if (order == 0) return gaussian_blur(img, sigma);
    const Kernel1D g = gaussian_kernel_1d(sigma);
    if (order == 1) {
        const Kernel1D d = gaussian_derivative_kernel_1d(sigma);
        GrayImage gx = convolve_separable(img, d, g);
        const GrayImage gy = convolve_separable(img, g, d);
        auto a = gx.pixels();
        auto b = gy.pixels();
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sqrt(a[i] * a[i] + b[i] * b[i]);
        return gx;
    }
    if (order == 2) {
        const Kernel1D d2 = gaussian_second_derivative_kernel_1d(sigma);
        GrayImage gxx = convolve_separable(img, d2, g);
        const GrayImage gyy = convolve_separable(img, g, d2);
        auto a = gxx.pixels();
        auto b = gyy.pixels();
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        return gxx;
    }
    throw DomainError("gaussian_derivative: order must be 0, 1 or 2 (got " + std::to_string(order) + ")");
}

//----------------------------------------------------------------------------//
// Named preprocessors
//----------------------------------------------------------------------------//

enum class Preprocessor { None, Gamma, Dog, GDeriv0, GDeriv1, GDeriv2, Bf };

inline constexpr std::array<std::pair<Preprocessor, std::string_view>, 7> kPreprocessorNames{{
    {Preprocessor::None, "none"},
    {Preprocessor::Gamma, "gamma"},
    {Preprocessor::Dog, "dog"},
    {Preprocessor::GDeriv0, "gderiv0"},
    {Preprocessor::GDeriv1, "gderiv1"},
    {Preprocessor::GDeriv2, "gderiv2"},
    {Preprocessor::Bf, "bf"},
}};

inline std::string_view to_string(Preprocessor p) {
    for (auto& [k, name] : kPreprocessorNames)
        if (k == p) return name;
    return "?";
}

inline std::optional<Preprocessor> parse_preprocessor(std::string_view name) {
    for (auto& [k, n] : kPreprocessorNames)
        if (n == name) return k;
    return std::nullopt;
}

struct PreprocConfig {
    Preprocessor kind = Preprocessor::None;
    BfParams bf{};              // bf, dog (sigma1/sigma2)
    double gamma = 0.5;         // gamma
    double gderiv_sigma = 1.0;  // gderiv0/1/2
};

/// Either a single image or an ON/OFF map pair.
using Preprocessed = std::variant<GrayImage, BfMaps>;

inline Preprocessed preprocess(const GrayImage& img, const PreprocConfig& cfg) {
    switch (cfg.kind) {
        case Preprocessor::None: return img;
        case Preprocessor::Gamma: return gamma_correct(img, cfg.gamma);
        case Preprocessor::Dog: return dog_only(img, cfg.bf.sigma1, cfg.bf.sigma2);
        case Preprocessor::GDeriv0: return gaussian_derivative(img, cfg.gderiv_sigma, 0);
        case Preprocessor::GDeriv1: return gaussian_derivative(img, cfg.gderiv_sigma, 1);
        case Preprocessor::GDeriv2: return gaussian_derivative(img, cfg.gderiv_sigma, 2);
        case Preprocessor::Bf: return bf_preprocess(img, cfg.bf);
    }
    throw ContractViolation("preprocess: unknown preprocessor");
}

} // namespace bftex

#endif // BFTEX_PREPROC_BASELINES_HPP_
