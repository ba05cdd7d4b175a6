// Minimal library walk-through: synthesise a small texture suite, describe
// every image with LBP on the ON/OFF maps, and classify half of it against
// the other half with the chi-square nearest neighbour.

#include <cstdio>

#include "bftex/bftex.hpp"

int main() {
    using namespace bftex;

    SyntheticSpec spec;
    spec.classes = 5;
    spec.per_class = 8;
    const SyntheticSuite suite = make_synthetic_suite(spec);
    const DescriptorConfig lbp = parse_descriptor("lbp:8:1");

    ReferenceSet refs;
    std::vector<LabeledHistogram> queries;
    for (std::size_t i = 0; i < suite.images.size(); ++i) {
        const BfMaps maps = bf_preprocess(suite.images[i], BfParams{1.0, 4.0, 0.1});
        Histogram h = extract(maps, lbp);
        const std::uint32_t label = suite.manifest.samples[i].label;
        if (i % 2 == 0) refs.add(std::move(h), label);
        else queries.push_back({std::move(h), label});
    }

    const Evaluation ev = evaluate(queries, refs);
    std::printf("%zu references, %zu queries, accuracy %.1f%%\n", refs.size(), queries.size(), 100 * ev.accuracy);
    return 0;
}
