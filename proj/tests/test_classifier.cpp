#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace bftex;

namespace {

Histogram hist(std::vector<double> bins, std::string scheme = "T") {
    Histogram h;
    h.dims = {bins.size()};
    h.bins = std::move(bins);
    h.scheme = std::move(scheme);
    return h;
}

Histogram random_hist(CounterRng& rng, std::size_t n, double sparsity = 0.3) {
    std::vector<double> b(n);
    for (double& v : b) v = rng.uniform() < sparsity ? 0.0 : rng.uniform();
    Histogram h = hist(std::move(b));
    h.normalize();
    return h;
}

} // namespace

TEST(Chi2, HandValues) {
    EXPECT_EQ(chi2(hist({0.2, 0.8}), hist({0.2, 0.8})), 0.0);
    EXPECT_DOUBLE_EQ(chi2(hist({1, 0}), hist({0, 1})), 2.0);
    EXPECT_NEAR(chi2(hist({0.5, 0.5}), hist({0.25, 0.75})), 0.0625 / 0.75 + 0.0625 / 1.25, 1e-15);
    EXPECT_NEAR(chi2(hist({0.5, 0.5}), hist({0.25, 0.75})), 0.133333, 1e-6);
    EXPECT_EQ(chi2(hist({0, 0, 1}), hist({0, 0, 1})), 0.0);  // 0/0 bins contribute nothing
    EXPECT_THROW(chi2(hist({1}), hist({0.5, 0.5})), ContractViolation);
}

TEST(Chi2, SymmetricNonNegative) {
    CounterRng rng(5);
    for (int i = 0; i < 10000; ++i) {
        const Histogram a = random_hist(rng, 12), b = random_hist(rng, 12);
        const double ab = chi2(a, b);
        EXPECT_GE(ab, 0.0);
        EXPECT_EQ(ab, chi2(b, a));
        EXPECT_EQ(chi2(a, a), 0.0);
    }
}

TEST(Chi2, MatchesOracle) {
    CounterRng rng(6);
    for (int i = 0; i < 200; ++i) {
        const Histogram a = random_hist(rng, 30), b = random_hist(rng, 30);
        EXPECT_EQ(chi2(a, b), oracle::chi2(a.bins, b.bins));
    }
}

TEST(NearestNeighbour, ExactMatchAndTieBreak) {
    ReferenceSet refs;
    refs.add(hist({1, 0, 0}), 7);
    refs.add(hist({0, 1, 0}), 3);
    refs.add(hist({0, 1, 0}), 5);
    const Match m = nn_classify(hist({0, 1, 0}), refs);
    EXPECT_EQ(m.label, 3u);
    EXPECT_EQ(m.index, 1u);
    EXPECT_EQ(m.distance, 0.0);
    // Equidistant to the first two references: the earlier one wins.
    EXPECT_EQ(nn_classify(hist({0.5, 0.5, 0}), refs).label, 7u);
}

TEST(NearestNeighbour, ContractViolations) {
    ReferenceSet refs;
    EXPECT_THROW(nn_classify(hist({1}), refs), ContractViolation);
    refs.add(hist({1, 0}), 0);
    EXPECT_THROW(refs.add(hist({1, 0, 0}), 1), ContractViolation);
    EXPECT_THROW(refs.add(hist({1, 0}, "other"), 1), ContractViolation);
    EXPECT_THROW(nn_classify(hist({1, 0, 0}), refs), ContractViolation);
}

TEST(NearestNeighbour, MatchesExhaustiveOracle) {
    CounterRng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        ReferenceSet refs;
        std::vector<std::vector<double>> raw;
        for (int i = 0; i < 15; ++i) {
            Histogram h = random_hist(rng, 8, 0.5);
            raw.push_back(h.bins);
            refs.add(h, static_cast<std::uint32_t>(i % 3));
        }
        const Histogram q = random_hist(rng, 8, 0.5);
        const std::size_t idx = oracle::nearest(q.bins, raw);
        const Match m = nn_classify(q, refs);
        EXPECT_EQ(m.index, idx);
        EXPECT_EQ(m.label, static_cast<std::uint32_t>(idx % 3));
    }
}

TEST(NearestNeighbour, ScaleInvariance) {
    CounterRng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        ReferenceSet refs, scaled;
        for (int i = 0; i < 10; ++i) {
            Histogram h = random_hist(rng, 10);
            refs.add(h, static_cast<std::uint32_t>(i));
            for (double& b : h.bins) b *= 4.0;
            scaled.add(h, static_cast<std::uint32_t>(i));
        }
        Histogram q = random_hist(rng, 10);
        const Match a = nn_classify(q, refs);
        for (double& b : q.bins) b *= 4.0;
        const Match b = nn_classify(q, scaled);
        EXPECT_EQ(a.index, b.index);
        EXPECT_DOUBLE_EQ(b.distance, 4.0 * a.distance);
    }
}

TEST(Evaluate, IdentityAndAdversarial) {
    ReferenceSet refs;
    std::vector<LabeledHistogram> same, wrong;
    for (std::uint32_t c = 0; c < 3; ++c) {
        std::vector<double> b(3, 0.0);
        b[c] = 1.0;
        refs.add(hist(b), c);
        same.push_back({hist(b), c});
        wrong.push_back({hist(b), (c + 1) % 3});
    }
    EXPECT_EQ(evaluate(same, refs).accuracy, 1.0);
    EXPECT_EQ(evaluate(wrong, refs).accuracy, 0.0);
    EXPECT_THROW(evaluate(std::vector<LabeledHistogram>{}, refs), ContractViolation);
}

TEST(Evaluate, UnknownQueryLabelCounted) {
    ReferenceSet refs;
    refs.add(hist({1, 0}), 0);
    refs.add(hist({0, 1}), 1);
    const std::vector<LabeledHistogram> q{{hist({1, 0}), 0}, {hist({0, 1}), 9}};
    const Evaluation ev = evaluate(q, refs);
    EXPECT_EQ(ev.accuracy, 0.5);
    EXPECT_EQ(ev.classes, (std::vector<std::uint32_t>{0, 1, 9}));
    EXPECT_EQ(ev.confusion[2][1], 1u);
}

TEST(Evaluate, MatchesDoubleLoopOracle) {
    CounterRng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        ReferenceSet refs;
        std::vector<std::vector<double>> raw;
        std::vector<std::uint32_t> ref_labels;
        for (int i = 0; i < 20; ++i) {
            const Histogram h = random_hist(rng, 6, 0.4);
            const auto label = static_cast<std::uint32_t>(rng.below(4));
            refs.add(h, label);
            raw.push_back(h.bins);
            ref_labels.push_back(label);
        }
        std::vector<LabeledHistogram> queries;
        for (int i = 0; i < 30; ++i) queries.push_back({random_hist(rng, 6, 0.4), static_cast<std::uint32_t>(rng.below(4))});
        const Evaluation ev = evaluate(queries, refs);

        std::size_t correct = 0;
        std::vector<std::size_t> per_class(4, 0);
        for (std::size_t i = 0; i < queries.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t pred = 0;
            for (std::size_t j = 0; j < raw.size(); ++j) {
                const double d = oracle::chi2(queries[i].histogram.bins, raw[j]);
                if (d < best) best = d, pred = ref_labels[j];
            }
            EXPECT_EQ(ev.predictions[i], pred);
            correct += pred == queries[i].label;
            ++per_class[queries[i].label];
        }
        EXPECT_EQ(ev.accuracy, static_cast<double>(correct) / 30.0);
        for (std::size_t r = 0; r < ev.classes.size(); ++r) {
            std::size_t row_sum = 0;
            for (auto v : ev.confusion[r]) row_sum += v;
            EXPECT_EQ(row_sum, per_class[ev.classes[r]]);
        }
    }
}
