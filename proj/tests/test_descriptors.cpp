#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace bftex;
using bftex::test::random_image;

namespace {

double sum(const Histogram& h) {
    double s = 0;
    for (double b : h.bins) s += b;
    return s;
}

DescriptorConfig make(Family f, Scheme s, unsigned P, double R) {
    DescriptorConfig c;
    c.family = f;
    c.scheme = s;
    c.spec = {P, R};
    return c;
}

} // namespace

TEST(Neighborhood, AxisNeighboursAreExact) {
    const GrayImage img = random_image(7, 7, 1);
    const auto v = sample_neighbors(img, 3, 3, {4, 1.0});
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0], img(3, 4));  // k=0: east
    EXPECT_EQ(v[1], img(2, 3));  // k=1: north
    EXPECT_EQ(v[2], img(3, 2));  // west
    EXPECT_EQ(v[3], img(4, 3));  // south
}

TEST(Neighborhood, DiagonalBilinearWeights) {
    // Neighbour k=1 of P=8, R=1 sits at (-0.7071, +0.7071) and blends the
    // pixels (2,3), (2,4), (3,3), (3,4) around centre (3,3).
    const double f = 1.0 - std::sqrt(0.5);
    const double w_near = (1 - f) * (1 - f), w_mid = f * (1 - f), w_far = f * f;
    EXPECT_NEAR(w_near, 0.5, 1e-12);
    EXPECT_NEAR(w_mid, 0.2071, 1e-4);
    EXPECT_NEAR(w_far, 0.0858, 1e-4);
    auto weight_of = [](std::size_t r, std::size_t c) {
        GrayImage img(7, 7, 0.0);
        img(r, c) = 1.0;
        return sample_neighbors(img, 3, 3, {8, 1.0})[1];
    };
    EXPECT_NEAR(weight_of(3, 3), w_far, 1e-12);  // the centre is the far corner
    EXPECT_NEAR(weight_of(2, 4), w_near, 1e-12);
    EXPECT_NEAR(weight_of(2, 3), w_mid, 1e-12);
    EXPECT_NEAR(weight_of(3, 4), w_mid, 1e-12);
}

TEST(Neighborhood, ConstantImageSamplesConstant) {
    const GrayImage img(12, 12, 0.3);
    for (NeighborhoodSpec s : {NeighborhoodSpec{8, 1}, {16, 2}, {24, 3}, {16, 3}, {24, 5}}) {
        if (2 * s.margin() + 1 > 12) continue;
        for (double v : sample_neighbors(img, 6, 6, s)) EXPECT_EQ(v, 0.3);
    }
}

TEST(Neighborhood, OutsideInteriorIsContractViolation) {
    const GrayImage img(9, 9);
    EXPECT_THROW(sample_neighbors(img, 1, 4, {8, 1}), ContractViolation);
    EXPECT_THROW(sample_neighbors(img, 4, 7, {8, 1}), ContractViolation);
    EXPECT_NO_THROW(sample_neighbors(img, 2, 6, {8, 1}));
    EXPECT_THROW((NeighborhoodSpec{3, 1}.validate()), DomainError);
    EXPECT_THROW((NeighborhoodSpec{8, 0}.validate()), DomainError);
}

TEST(Riu2, KnownLabelsP8) {
    const auto t = riu2_map(8);
    ASSERT_EQ(t.size(), 256u);
    EXPECT_EQ(t[0], 0);
    EXPECT_EQ(t[0xFF], 8);
    EXPECT_EQ(t[0b01010101], 9);
    EXPECT_EQ(t[0b00011100], 3);
    EXPECT_EQ(t[0b10000001], 2);
}

TEST(Riu2, MatchesBitStringOracle) {
    for (unsigned P : {4u, 8u, 12u}) {
        const auto t = riu2_map(P);
        for (std::uint32_t c = 0; c < t.size(); ++c) ASSERT_EQ(t[c], oracle::riu2_from_bits(oracle::bits_of(c, P)));
    }
}

TEST(Riu2, LabelCounts) {
    for (unsigned P : {8u, 16u, 24u}) {
        const auto t = riu2_map(P);
        const std::set<std::uint8_t> labels(t.begin(), t.end());
        EXPECT_EQ(labels.size(), P + 2);
        EXPECT_EQ(*labels.rbegin(), P + 1);
    }
}

TEST(Descriptor, ParseAndFormat) {
    const auto d = parse_descriptor("clbp:S/M/C:16:2");
    EXPECT_EQ(d.family, Family::Clbp);
    EXPECT_EQ(d.scheme, Scheme::SjMjC);
    EXPECT_EQ(d.spec.P, 16u);
    EXPECT_EQ(d.spec.R, 2.0);
    EXPECT_EQ(d.tag(), "CLBP_S/M/C");
    EXPECT_EQ(parse_descriptor(format_descriptor(d)), d);
    EXPECT_EQ(parse_descriptor("lbp:24:3").tag(), "LBP");
    EXPECT_EQ(parse_descriptor("wld").family, Family::Wld);
    EXPECT_EQ(parse_descriptor("clbc:M_S/C:8:1").tag(), "CLBC_M_S/C");
    EXPECT_THROW(parse_descriptor("sift:8:1"), ConfigError);
    EXPECT_THROW(parse_descriptor("clbp:S/X:8:1"), ConfigError);
    EXPECT_THROW(parse_descriptor("lbp:8"), ConfigError);
    EXPECT_THROW(parse_descriptor("lbp:x:1"), ConfigError);
    EXPECT_THROW(parse_descriptor("lbp:2:1"), DomainError);
}

TEST(Dimensions, PublishedFeatureSizes) {
    EXPECT_EQ(feature_size(make(Family::Lbp, Scheme::S, 16, 2)), 18u);
    EXPECT_EQ(feature_size(make(Family::Lbp, Scheme::S, 24, 3)), 26u);
    EXPECT_EQ(feature_size(make(Family::Lbp, Scheme::S, 16, 2), true), 36u);
    EXPECT_EQ(feature_size(make(Family::Lbp, Scheme::S, 24, 3), true), 52u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::S_MjC, 16, 2)), 54u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::S_MjC, 24, 3)), 78u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::SjM, 16, 2)), 324u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::SjM, 24, 3)), 676u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::SjMjC, 8, 1)), 200u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::SjMjC, 16, 2)), 648u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::SjMjC, 24, 3)), 1352u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::S, 8, 1), true), 20u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::S, 16, 2), true), 36u);
    EXPECT_EQ(feature_size(make(Family::Clbp, Scheme::S, 24, 3), true), 52u);
}

TEST(Dimensions, DerivedSizes) {
    EXPECT_EQ(feature_size(make(Family::Clbc, Scheme::S, 8, 1)), 9u);
    EXPECT_EQ(feature_size(make(Family::Clbc, Scheme::SjM, 8, 1)), 81u);
    EXPECT_EQ(feature_size(make(Family::Clbc, Scheme::SjMjC, 8, 1)), 162u);
    EXPECT_EQ(feature_size(make(Family::Ltp, Scheme::S, 8, 1)), 20u);
    EXPECT_EQ(feature_size(make(Family::Wld, Scheme::S, 8, 1)), 960u);
    const std::size_t B = 10;
    EXPECT_EQ(product(scheme_dims(Scheme::C, B)), 2u);
    EXPECT_EQ(product(scheme_dims(Scheme::S_M, B)), 2 * B);
    EXPECT_EQ(product(scheme_dims(Scheme::SjC, B)), 2 * B);
    EXPECT_EQ(product(scheme_dims(Scheme::MjC, B)), 2 * B);
    EXPECT_EQ(product(scheme_dims(Scheme::M_SjC, B)), 3 * B);
}

TEST(Dimensions, ExtractedHistogramsMatchContract) {
    const GrayImage img = random_image(24, 24, 3);
    const BfMaps maps = bf_preprocess(img);
    for (Family f : {Family::Clbp, Family::Clbc}) {
        for (const auto& [scheme, name] : kSchemeNames) {
            for (NeighborhoodSpec s : {NeighborhoodSpec{8, 1}, {16, 2}, {24, 3}}) {
                const auto cfg = make(f, scheme, s.P, s.R);
                const Histogram h = extract(img, cfg);
                EXPECT_EQ(h.size(), feature_size(cfg)) << cfg.tag();
                EXPECT_EQ(product(h.dims), h.size());
                EXPECT_NEAR(sum(h), 1.0, 1e-9);
                EXPECT_EQ(extract(maps, cfg).size(), 2 * h.size());
            }
        }
    }
    EXPECT_EQ(extract(img, make(Family::Wld, Scheme::S, 8, 1)).size(), 960u);
    EXPECT_EQ(extract(img, make(Family::Ltp, Scheme::S, 16, 2)).size(), 36u);
}

TEST(Clbp, ConstantImageDegenerateLabels) {
    const LabelMap l = clbp_codes(GrayImage(9, 9, 0.4), {8, 1});
    ASSERT_EQ(l.count(), 25u);
    for (std::size_t i = 0; i < l.count(); ++i) {
        EXPECT_EQ(l.s[i], 8);
        EXPECT_EQ(l.m[i], 8);
        EXPECT_EQ(l.c[i], 1);
    }
}

TEST(Clbp, PeakPixelHasSignLabelZero) {
    GrayImage img(9, 9, 0.2);
    img(4, 4) = 0.9;
    const LabelMap l = clbp_codes(img, {8, 1});
    EXPECT_EQ(l.s[2 * l.width + 2], 0);  // interior starts at (2,2)
}

TEST(Clbp, MatchesNaiveOracle) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GrayImage img = random_image(8 + seed % 3, 8, seed);
        for (NeighborhoodSpec s : {NeighborhoodSpec{8, 1}, {4, 1.5}}) {
            const LabelMap l = clbp_codes(img, s);
            const auto o = oracle::encode(img, s.P, s.R, oracle::Encoding::Clbp);
            ASSERT_EQ(l.count(), o.s.size());
            for (std::size_t i = 0; i < l.count(); ++i) {
                EXPECT_EQ(l.s[i], o.s[i]);
                EXPECT_EQ(l.m[i], o.m[i]);
                EXPECT_EQ(l.c[i], o.c[i]);
            }
        }
    }
}

TEST(Clbp, OffsetInvarianceOfSign) {
    const GrayImage img = random_image(16, 16, 21);
    GrayImage shifted = img;
    for (double& v : shifted.pixels()) v += 0.25;  // exactly representable shift
    EXPECT_EQ(clbp_codes(img, {8, 1}).s, clbp_codes(shifted, {8, 1}).s);
}

TEST(Clbp, RotationByQuarterTurnPreservesHistogram) {
    const GrayImage img = random_image(20, 20, 31);
    // P=4, R=1 samples only grid pixels, so rotation permutes them exactly.
    const auto cfg = make(Family::Clbp, Scheme::SjMjC, 4, 1);
    const Histogram a = extract(img, cfg), b = extract(rotate90(img), cfg);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.bins[i], b.bins[i], 1e-12);
}

TEST(Clbc, MatchesOracleAndPopcount) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GrayImage img = random_image(8, 8, 100 + seed);
        const LabelMap l = clbc_codes(img, {8, 1});
        const auto o = oracle::encode(img, 8, 1, oracle::Encoding::Clbc);
        const LocalPatterns pat = local_patterns(img, {8, 1});
        for (std::size_t i = 0; i < l.count(); ++i) {
            EXPECT_EQ(l.s[i], o.s[i]);
            EXPECT_EQ(l.m[i], o.m[i]);
            EXPECT_EQ(l.c[i], o.c[i]);
            EXPECT_EQ(l.s[i], std::popcount(pat.sign[i]));
        }
    }
    const LabelMap flat = clbc_codes(GrayImage(8, 8, 0.5), {8, 1});
    for (auto s : flat.s) EXPECT_EQ(s, 8);
}

TEST(Ltp, MatchesOracle) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GrayImage img = random_image(10, 9, 200 + seed);
        const LabelMap l = ltp_codes(img, {8, 1}, 0.05);
        const auto o = oracle::encode(img, 8, 1, oracle::Encoding::Ltp, 0.05);
        for (std::size_t i = 0; i < l.count(); ++i) {
            EXPECT_EQ(l.s[i], o.s[i]);
            EXPECT_EQ(l.m[i], o.m[i]);
        }
    }
}

TEST(Ltp, ZeroThresholdUpperEqualsSign) {
    const GrayImage img = random_image(12, 12, 77);
    EXPECT_EQ(ltp_codes(img, {8, 1}, 0.0).s, clbp_codes(img, {8, 1}).s);
}

TEST(Ltp, ConstantImageConcentratesAtZero) {
    const Histogram h = ltp_histogram(GrayImage(10, 10, 0.5), {8, 1}, 5.0 / 255);
    ASSERT_EQ(h.size(), 20u);
    EXPECT_DOUBLE_EQ(h.bins[0], 0.5);
    EXPECT_DOUBLE_EQ(h.bins[10], 0.5);
    EXPECT_THROW(ltp_codes(GrayImage(10, 10), {8, 1}, -1), DomainError);
}

TEST(Wld, ConstantImageUsesCentralSegment) {
    const Histogram h = wld_histogram(GrayImage(10, 10, 0.5));
    ASSERT_EQ(h.size(), 960u);
    // xi = 0 sits at the start of segment M/2; orientation atan2(0,0) = 0.
    const std::size_t idx = (3 * 8 + 0) * 20 + 0;
    EXPECT_DOUBLE_EQ(h.bins[idx], 1.0);
}

TEST(Wld, DarkCentreSaturatesExcitation) {
    GrayImage img(3, 3, 1.0);
    img(1, 1) = 0.0;
    const Histogram h = wld_histogram(img);
    // atan(8 / (1/255)) is just below pi/2: last segment, last sub-bin.
    const std::size_t idx = (5 * 8 + 0) * 20 + 19;
    EXPECT_DOUBLE_EQ(h.bins[idx], 1.0);
    EXPECT_NEAR(std::atan(8.0 * 255.0), std::numbers::pi / 2, 1e-3);
}

TEST(Histogram, SchemeLayout) {
    LabelMap l;
    l.bins = 4;
    l.s = {1, 3};
    l.m = {2, 0};
    l.c = {1, 0};
    const Histogram sm = build_histogram(l, Scheme::S_M);
    EXPECT_EQ(sm.bins, (std::vector<double>{0, 0.25, 0, 0.25, 0.25, 0, 0.25, 0}));
    const Histogram joint = build_histogram(l, Scheme::SjMjC);
    EXPECT_EQ(joint.size(), 32u);
    EXPECT_DOUBLE_EQ(joint.bins[1 + 4 * 2 + 16 * 1], 0.5);
    EXPECT_DOUBLE_EQ(joint.bins[3 + 0 + 0], 0.5);
    const Histogram msc = build_histogram(l, Scheme::M_SjC);
    EXPECT_EQ(msc.size(), 12u);
    EXPECT_DOUBLE_EQ(msc.bins[2], 0.25);
    EXPECT_DOUBLE_EQ(msc.bins[4 + 1 + 4], 0.25);
    l.s[0] = 4;
    EXPECT_THROW(build_histogram(l, Scheme::S), ContractViolation);
}

TEST(Extract, BfMapsConcatenateOnFirst) {
    const GrayImage img = random_image(30, 30, 8);
    const BfMaps maps = bf_preprocess(img);
    const auto cfg = make(Family::Lbp, Scheme::S, 8, 1);
    const Histogram on = extract(maps.plus, cfg), off = extract(maps.minus, cfg), both = extract(maps, cfg);
    ASSERT_EQ(both.size(), 20u);
    EXPECT_EQ(both.dims, (std::vector<std::size_t>{10, 2}));
    EXPECT_NEAR(sum(both), 1.0, 1e-12);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_NEAR(both.bins[i], on.bins[i] / 2, 1e-15);
        EXPECT_NEAR(both.bins[10 + i], off.bins[i] / 2, 1e-15);
    }
}

TEST(Extract, ConstantBfMapsConcentrateInOneBin) {
    // Both maps are all zero; under the >= convention every pixel is the
    // all-ones pattern, label P.
    const BfMaps maps = bf_preprocess(GrayImage(16, 16, 0.5));
    const Histogram h = extract(maps, make(Family::Lbp, Scheme::S, 8, 1));
    EXPECT_DOUBLE_EQ(h.bins[8], 0.5);
    EXPECT_DOUBLE_EQ(h.bins[18], 0.5);
}

TEST(Extract, TooSmallImageRejected) {
    EXPECT_THROW(extract(GrayImage(4, 4), make(Family::Lbp, Scheme::S, 8, 1)), ContractViolation);
    EXPECT_THROW(extract(GrayImage(8, 8), make(Family::Lbp, Scheme::SjM, 8, 1)), ContractViolation);
}
