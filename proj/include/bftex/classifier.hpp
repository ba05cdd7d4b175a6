#ifndef BFTEX_CLASSIFIER_HPP_
#define BFTEX_CLASSIFIER_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "descriptors.hpp"
#include "errors.hpp"

namespace bftex {

/// Chi-square histogram distance sum (h - k)^2 / (h + k); bins with
/// h + k == 0 contribute nothing.
inline double chi2(std::span<const double> h, std::span<const double> k) {
    if (h.size() != k.size())
        throw ContractViolation("chi2: histogram lengths differ (" + std::to_string(h.size()) + " vs " +
                                std::to_string(k.size()) + ")");
    double d = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double s = h[i] + k[i];
        if (s != 0.0) {
            const double diff = h[i] - k[i];
            d += diff * diff / s;
        }
    }
    return d;
}

inline double chi2(const Histogram& h, const Histogram& k) { return chi2(h.bins, k.bins); }

/// Training side of the nearest-neighbour classifier. Immutable once built.
class ReferenceSet {
public:
    struct Entry {
        Histogram histogram;
        std::uint32_t label;
    };

    ReferenceSet() = default;

    explicit ReferenceSet(std::vector<Entry> entries) {
        for (auto& e : entries) add(std::move(e.histogram), e.label);
    }

    void add(Histogram h, std::uint32_t label) {
        if (!entries_.empty()) {
            if (h.size() != dims_)
                throw ContractViolation("ReferenceSet: histogram length " + std::to_string(h.size()) +
                                        " != " + std::to_string(dims_));
            if (h.scheme != entries_.front().histogram.scheme)
                throw ContractViolation("ReferenceSet: scheme '" + h.scheme + "' != '" +
                                        entries_.front().histogram.scheme + "'");
        } else {
            dims_ = h.size();
        }
        entries_.push_back({std::move(h), label});
    }

    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t dims() const noexcept { return dims_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

private:
    std::vector<Entry> entries_;
    std::size_t dims_ = 0;
};

struct Match {
    std::uint32_t label = 0;
    double distance = 0;
    std::size_t index = 0;  // position of the nearest reference
};

/// Exhaustive scan; ties go to the lowest reference index.
inline Match nn_classify(std::span<const double> query, const ReferenceSet& refs) {
    if (refs.empty()) throw ContractViolation("nn_classify: empty reference set");
    if (query.size() != refs.dims())
        throw ContractViolation("nn_classify: query length " + std::to_string(query.size()) +
                                " != reference length " + std::to_string(refs.dims()));
    Match best{0, std::numeric_limits<double>::infinity(), 0};
    const auto& entries = refs.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const double d = chi2(query, entries[i].histogram.bins);
        if (d < best.distance) best = {entries[i].label, d, i};
    }
    if (best.distance == std::numeric_limits<double>::infinity()) best = {entries.front().label, best.distance, 0};
    return best;
}

inline Match nn_classify(const Histogram& query, const ReferenceSet& refs) { return nn_classify(query.bins, refs); }

struct LabeledHistogram {
    Histogram histogram;
    std::uint32_t label;
};

struct Evaluation {
    double accuracy = 0;
    std::vector<std::uint32_t> classes;               // row / column order of the confusion matrix
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    std::vector<std::uint32_t> predictions;
};

/// Classifies every query against `refs`. Query labels absent from the
/// reference set still get a confusion row; they are never predicted correctly.
inline Evaluation evaluate(std::span<const LabeledHistogram> queries, const ReferenceSet& refs) {
    if (queries.empty()) throw ContractViolation("evaluate: no queries");
    Evaluation ev;
    for (const auto& e : refs.entries()) ev.classes.push_back(e.label);
    for (const auto& q : queries) ev.classes.push_back(q.label);
    std::sort(ev.classes.begin(), ev.classes.end());
    ev.classes.erase(std::unique(ev.classes.begin(), ev.classes.end()), ev.classes.end());
    auto index_of = [&](std::uint32_t label) {
        return static_cast<std::size_t>(std::lower_bound(ev.classes.begin(), ev.classes.end(), label) -
                                        ev.classes.begin());
    };
    ev.confusion.assign(ev.classes.size(), std::vector<std::size_t>(ev.classes.size(), 0));
    std::size_t correct = 0;
    ev.predictions.reserve(queries.size());
    for (const auto& q : queries) {
        const Match m = nn_classify(q.histogram, refs);
        ev.predictions.push_back(m.label);
        ++ev.confusion[index_of(q.label)][index_of(m.label)];
        if (m.label == q.label) ++correct;
    }
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(queries.size());
    return ev;
}

} // namespace bftex

#endif // BFTEX_CLASSIFIER_HPP_
