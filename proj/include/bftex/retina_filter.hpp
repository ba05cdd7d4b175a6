#ifndef BFTEX_RETINA_FILTER_HPP_
#define BFTEX_RETINA_FILTER_HPP_

#include <cmath>
#include <string>

#include "errors.hpp"
#include "imaging.hpp"

namespace bftex {

/// Parameters of the biologically-inspired filter: the two Gaussian blurs of
/// the difference-of-Gaussians stage (photoreceptor and horizontal-cell
/// layers) and the threshold below which a response counts as uniform.
struct BfParams {
    double sigma1 = 1.0;
    double sigma2 = 4.0;
    double epsilon = 0.1;

    void validate() const {
        if (!(sigma1 > 0.0) || !std::isfinite(sigma1))
            throw DomainError("BfParams: sigma1 must be > 0");
        if (!(sigma2 > sigma1) || !std::isfinite(sigma2))
            throw DomainError("BfParams: requires sigma1 < sigma2 (got sigma1=" + std::to_string(sigma1) +
                              ", sigma2=" + std::to_string(sigma2) + ")");
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
            throw DomainError("BfParams: epsilon must be >= 0");
    }

    friend bool operator==(const BfParams&, const BfParams&) = default;
};

/// ON / OFF decomposition of a DoG response.
///
/// `plus` holds responses >= epsilon, `minus` the magnitudes of responses
/// <= -epsilon; everything in between (and exact zeros) is dropped from both.
/// `raw` keeps the signed response.
struct BfMaps {
    GrayImage plus;
    GrayImage minus;
    GrayImage raw;
};

/// G(sigma1) * img - G(sigma2) * img. Each blur has unit DC gain, so a
/// constant image yields exactly zero.
inline GrayImage dog_filter(const GrayImage& img, const BfParams& p) {
    p.validate();
    GrayImage narrow = gaussian_blur(img, p.sigma1);
    const GrayImage wide = gaussian_blur(img, p.sigma2);
    auto dst = narrow.pixels();
    auto sub = wide.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= sub[i];
    return narrow;
}

inline BfMaps split_maps(const GrayImage& response, double epsilon) {
    if (!(epsilon >= 0.0)) throw DomainError("split_maps: epsilon must be >= 0");
    BfMaps maps{GrayImage(response.width(), response.height()), GrayImage(response.width(), response.height()),
                response};
    auto src = response.pixels();
    auto on = maps.plus.pixels();
    auto off = maps.minus.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double v = src[i];
        if (v > 0.0 && v >= epsilon) on[i] = v;
        else if (v < 0.0 && v <= -epsilon) off[i] = -v;
    }
    return maps;
}

inline BfMaps bf_preprocess(const GrayImage& img, const BfParams& p = {}) {
    return split_maps(dog_filter(img, p), p.epsilon);
}

} // namespace bftex

#endif // BFTEX_RETINA_FILTER_HPP_
