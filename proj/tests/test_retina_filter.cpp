#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace bftex;
using bftex::test::dense_convolve;
using bftex::test::max_abs_diff;
using bftex::test::random_image;

TEST(BfParams, DefaultsAndValidation) {
    const BfParams p;
    EXPECT_EQ(p.sigma1, 1.0);
    EXPECT_EQ(p.sigma2, 4.0);
    EXPECT_EQ(p.epsilon, 0.1);
    EXPECT_NO_THROW(p.validate());
    EXPECT_THROW((BfParams{4, 2, 0.1}.validate()), DomainError);
    EXPECT_THROW((BfParams{2, 2, 0.1}.validate()), DomainError);
    EXPECT_THROW((BfParams{0, 2, 0.1}.validate()), DomainError);
    EXPECT_THROW((BfParams{1, 2, -0.1}.validate()), DomainError);
    EXPECT_NO_THROW((BfParams{1, 2, 0.0}.validate()));
}

TEST(DogFilter, ContinuousKernelPeak) {
    // Difference of two unit-mass 2-D Gaussians at the origin.
    const double g1 = 1.0 / (2 * std::numbers::pi * 1.0), g2 = 1.0 / (2 * std::numbers::pi * 16.0);
    EXPECT_NEAR(g1 - g2, 15.0 / (32.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(g1 - g2, 0.149207, 1e-6);
    // The discrete impulse response approaches it (truncation + sampling error).
    GrayImage impulse(41, 41, 0.0);
    impulse(20, 20) = 1.0;
    EXPECT_NEAR(dog_filter(impulse, {})(20, 20), 15.0 / (32.0 * std::numbers::pi), 5e-3);
}

TEST(DogFilter, ConstantImageGivesZero) {
    const GrayImage img(17, 11, 0.5);
    for (double v : dog_filter(img, {}).pixels()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(DogFilter, MatchesDenseOracle) {
    const GrayImage img = random_image(20, 16, 3);
    const BfParams p{0.75, 2.5, 0.1};
    GrayImage oracle = dense_convolve(img, gaussian_kernel_1d(p.sigma1), gaussian_kernel_1d(p.sigma1));
    const GrayImage wide = dense_convolve(img, gaussian_kernel_1d(p.sigma2), gaussian_kernel_1d(p.sigma2));
    for (std::size_t i = 0; i < oracle.size(); ++i) oracle.pixels()[i] -= wide.pixels()[i];
    EXPECT_LT(max_abs_diff(dog_filter(img, p), oracle), 1e-9);
}

TEST(DogFilter, StepEdgeResponse) {
    // Left half 0, right half 1. Narrow-minus-wide is positive on the bright
    // side next to the edge, negative on the dark side, zero far away.
    GrayImage step(32, 32, 0.0);
    for (std::size_t r = 0; r < 32; ++r)
        for (std::size_t c = 16; c < 32; ++c) step(r, c) = 1.0;
    const BfParams p;
    const GrayImage out = dog_filter(step, p);
    GrayImage oracle = dense_convolve(step, gaussian_kernel_1d(1), gaussian_kernel_1d(1));
    const GrayImage wide = dense_convolve(step, gaussian_kernel_1d(4), gaussian_kernel_1d(4));
    for (std::size_t i = 0; i < oracle.size(); ++i) oracle.pixels()[i] -= wide.pixels()[i];
    EXPECT_LT(max_abs_diff(out, oracle), 1e-9);
    for (std::size_t r = 0; r < 32; ++r) {
        EXPECT_LT(out(r, 15), 0.0);
        EXPECT_GT(out(r, 16), 0.0);
        EXPECT_NEAR(out(r, 15), -out(r, 16), 1e-12);  // odd symmetry about the edge
        EXPECT_EQ(out(r, 0), 0.0);
        EXPECT_NEAR(out(r, 31), 0.0, 1e-12);
    }
}

TEST(DogFilter, Linearity) {
    const BfParams p{1.25, 3, 0.1};
    const GrayImage x = random_image(24, 18, 1), y = random_image(24, 18, 2);
    GrayImage combo(24, 18);
    for (std::size_t i = 0; i < combo.size(); ++i) combo.pixels()[i] = 0.7 * x.pixels()[i] - 1.9 * y.pixels()[i];
    const GrayImage fx = dog_filter(x, p), fy = dog_filter(y, p), fc = dog_filter(combo, p);
    for (std::size_t i = 0; i < combo.size(); ++i)
        EXPECT_NEAR(fc.pixels()[i], 0.7 * fx.pixels()[i] - 1.9 * fy.pixels()[i], 1e-9);
}

TEST(DogFilter, IlluminationOffsetInvariance) {
    const GrayImage img = random_image(21, 19, 7);
    GrayImage shifted = img;
    for (double& v : shifted.pixels()) v += 0.3;
    EXPECT_LT(max_abs_diff(dog_filter(img, {}), dog_filter(shifted, {})), 1e-9);
}

TEST(DogFilter, QuarterTurnEquivariance) {
    const GrayImage img = random_image(23, 17, 5);
    EXPECT_LT(max_abs_diff(dog_filter(rotate90(img), {}), rotate90(dog_filter(img, {}))), 1e-9);
}

TEST(SplitMaps, DirectApplication) {
    const GrayImage r(2, 2, {0.2, -0.3, 0.05, -0.05});
    const BfMaps m = split_maps(r, 0.1);
    EXPECT_EQ(m.plus, GrayImage(2, 2, {0.2, 0, 0, 0}));
    EXPECT_EQ(m.minus, GrayImage(2, 2, {0, 0.3, 0, 0}));
    EXPECT_EQ(m.raw, r);
}

TEST(SplitMaps, ThresholdIsInclusive) {
    const GrayImage r(3, 1, {0.1, -0.1, 0.0999});
    const BfMaps m = split_maps(r, 0.1);
    EXPECT_EQ(m.plus(0, 0), 0.1);
    EXPECT_EQ(m.minus(0, 1), 0.1);
    EXPECT_EQ(m.plus(0, 2), 0.0);
}

TEST(SplitMaps, ZeroResponseGoesToNeitherMap) {
    const GrayImage r(3, 1, {0.0, 1e-300, -1e-300});
    const BfMaps m = split_maps(r, 0.0);
    EXPECT_EQ(m.plus(0, 0), 0.0);
    EXPECT_EQ(m.minus(0, 0), 0.0);
    EXPECT_EQ(m.plus(0, 1), 1e-300);
    EXPECT_EQ(m.minus(0, 2), 1e-300);
    EXPECT_THROW(split_maps(r, -1.0), DomainError);
}

TEST(BfPreprocess, MapInvariantsOnRandomImages) {
    CounterRng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const GrayImage img = random_image(16, 16, 1000 + static_cast<std::uint64_t>(trial));
        const BfParams p{rng.uniform(0.5, 1.5), rng.uniform(2.0, 6.0), rng.uniform(0.0, 0.3)};
        const BfMaps m = bf_preprocess(img, p);
        EXPECT_EQ(m.raw, dog_filter(img, p));
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double on = m.plus.pixels()[i], off = m.minus.pixels()[i], raw = m.raw.pixels()[i];
            EXPECT_GE(on, 0.0);
            EXPECT_GE(off, 0.0);
            EXPECT_EQ(on * off, 0.0);
            if (std::abs(raw) >= p.epsilon && raw != 0.0) EXPECT_EQ(on - off, raw);
            else EXPECT_EQ(on + off, 0.0);
        }
    }
}

TEST(BfPreprocess, ConstantImageGivesEmptyMaps) {
    const BfMaps m = bf_preprocess(GrayImage(12, 12, 0.6));
    for (double v : m.plus.pixels()) EXPECT_EQ(v, 0.0);
    for (double v : m.minus.pixels()) EXPECT_EQ(v, 0.0);
}

TEST(BfPreprocess, RejectsInvalidParameters) {
    EXPECT_THROW(bf_preprocess(GrayImage(8, 8), {4, 2, 0.1}), DomainError);
}
