// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "polywave/audio.hpp"
#include "polywave/datagen.hpp"
#include "polywave/equivalence.hpp"
#include "polywave/pipeline.hpp"
#include "polywave/threading.hpp"
#include "polywave/training.hpp"
#include "polywave/errors.hpp"
#include "polywave/rng.hpp"

using namespace polywave;

namespace {

const char* kNotesPnn = R"(input 1 1600
pnn 12 49 1 tanh
maxpool2
pnn 12 25 1 tanh
maxpool2
pnn 12 13 2 tanh
maxpool2
pnn 12 7 3 tanh
maxpool2
pnn 12 3 5 tanh
maxpool2
flatten
dense 96 relu
dense 88 softmax
)";

const char* kDenoisePnn = R"(input 1 1600
padding same
pnn 16 21 5 tanh
maxpool2
pnn 16 7 5 tanh
upsample2
pnn 1 11 5 tanh
)";

// Uniformly random conv-stack spec that composes; optional head.
NetworkSpec random_spec(Rng& rng) {
    NetworkSpec spec;
    spec.in_channels = 1 + rng.below(3);
    spec.in_samples = 4096;
    const std::size_t depth = 1 + rng.below(4);
    for (std::size_t l = 0; l < depth; ++l) {
        LayerSpec layer;
        layer.kind = LayerKind::pnn;
        layer.units = 1 + rng.below(16);
        layer.kernel = 1 + rng.below(9);
        layer.degree = 1 + static_cast<int>(rng.below(6));
        layer.act = Act::tanh;
        spec.layers.push_back(layer);
        if (rng.below(2) == 0) spec.layers.push_back({LayerKind::maxpool2});
    }
    if (rng.below(2) == 0) {
        spec.layers.push_back({LayerKind::flatten});
        LayerSpec dense;
        dense.kind = LayerKind::dense;
        dense.units = 1 + rng.below(32);
        dense.act = Act::tanh;
        spec.layers.push_back(dense);
    }
    return spec;
}

// Rounding slack of the construction: half a denominator per transformed
// layer, using the constructed widths.
std::size_t parity_bound(const EquivalenceReport& report) {
    std::size_t n_prev_equiv = report.source.in_channels;
    std::size_t bound2 = 0;  // twice the bound, to stay in integers
    std::size_t conv_seen = 0;
    const std::size_t conv_total = report.widths.size();
    for (const LayerSpec& l : report.source.layers) {
        if (!l.is_convolutional()) continue;
        const bool last = (++conv_seen == conv_total);
        bound2 += last ? n_prev_equiv * l.kernel + l.units + 1 : n_prev_equiv * l.kernel + 1;
        n_prev_equiv = report.widths[conv_seen - 1];
    }
    return bound2 / 2 + 1;
}

}  // namespace

TEST_CASE("inner width formula matches the reference layer widths") {
    CHECK(equivalent_inner_width(12, 12, 13, 2, 12) == 24);
    CHECK(equivalent_inner_width(12, 1, 49, 1, 1) == 12);
    // Degree 1 with matching previous width is the fixed point.
    Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(30);
        const std::size_t n_prev = 1 + rng.below(30);
        const std::size_t k = 1 + rng.below(15);
        CHECK(equivalent_inner_width(n, n_prev, k, 1, n_prev) == n);
    }
}

TEST_CASE("output width formula and its degenerate rejection") {
    // Spoken-digit last polynomial layer: pnn(8, 3, 6) after widths ending in 24.
    CHECK(equivalent_output_width(8, 8, 3, 6, 24) == 14);
    // Denoising construction chain: widths 77, 17, then 5.
    CHECK(equivalent_output_width(1, 16, 11, 5, 17) == 5);
    // Degree 1 with matching width shrinks strictly below the source width.
    CHECK(equivalent_output_width(10, 4, 5, 1, 4) < 10);
    // All arguments 1 floors to zero and is rejected.
    CHECK_THROWS_AS(equivalent_output_width(1, 1, 1, 1, 1), TopologyError);
}

TEST_CASE("width grows with the degree") {
    std::size_t prev = 0;
    for (int d = 1; d <= 60; ++d) {
        const std::size_t w = equivalent_inner_width(12, 12, 13, d, 12);
        CHECK(w >= prev);
        prev = w;
    }
    CHECK(equivalent_inner_width(12, 12, 13, 60, 12) >
          equivalent_inner_width(12, 12, 13, 1, 12));
}

TEST_CASE("build_equivalent is the identity on all-degree-1 specs") {
    NetworkSpec spec = parse_topology(kNotesPnn);
    for (LayerSpec& l : spec.layers) {
        if (l.kind == LayerKind::pnn) l.degree = 1;
    }
    const EquivalenceReport report = build_equivalent(spec);
    CHECK(report.constructed == spec);
    CHECK(report.added_projection == false);
    CHECK(report.abs_diff == 0);
    CHECK(emit_topology(report.constructed) == emit_topology(spec));
}

TEST_CASE("build_equivalent reproduces the first three note-recognition widths") {
    const EquivalenceReport report = build_equivalent(parse_topology(kNotesPnn));
    REQUIRE(report.widths.size() == 5);
    CHECK(report.widths[0] == 12);
    CHECK(report.widths[1] == 12);
    CHECK(report.widths[2] == 24);
    CHECK(report.added_projection == true);
    // The projection restores 12 channels, so the dense head sizes carry over
    // and the totals differ only by rounding residue.
    CHECK(report.constructed_params ==
          param_count(report.constructed));
    CHECK(static_cast<double>(report.abs_diff) <
          0.02 * static_cast<double>(report.source_params));
}

TEST_CASE("build_equivalent matches the reference denoising column") {
    const EquivalenceReport report = build_equivalent(parse_topology(kDenoisePnn));
    REQUIRE(report.widths.size() == 3);
    CHECK(report.widths[0] == 77);
    CHECK(report.widths[1] == 17);
    CHECK(report.widths[2] == 5);
    CHECK(report.source_params == 11553);
    CHECK(report.constructed_params == 11820);
    // Projection lands at the end of the stack: conv 1 1 tanh.
    const LayerSpec& last = report.constructed.layers.back();
    CHECK(last.kind == LayerKind::conv);
    CHECK(last.units == 1);
    CHECK(last.kernel == 1);
}

TEST_CASE("param parity obeys the rounding bound on a random corpus") {
    Rng rng(62);
    int built = 0;
    while (built < 200) {
        const NetworkSpec spec = random_spec(rng);
        EquivalenceReport report;
        try {
            report = build_equivalent(spec);
        } catch (const TopologyError&) {
            continue;  // degenerate construction; not part of the corpus
        }
        ++built;
        CHECK(report.abs_diff <= parity_bound(report));
    }
}

TEST_CASE("grow_to_performance returns the base when the target is already met") {
    const EquivalenceReport base = build_equivalent(parse_topology(kDenoisePnn));
    std::size_t evals = 0;
    const GrowResult result = grow_to_performance(
        base, 1.0,
        [&](const NetworkSpec&) {
            ++evals;
            return 2.0;
        },
        100);
    CHECK(result.met_target);
    CHECK(result.increments == 0);
    CHECK(result.spec == base.constructed);
    CHECK(evals == 1);
}

TEST_CASE("grow_to_performance walks a monotone synthetic metric") {
    const EquivalenceReport base = build_equivalent(parse_topology(kDenoisePnn));
    auto total_width = [](const NetworkSpec& spec) {
        double acc = 0.0;
        for (const LayerSpec& l : spec.layers) {
            if (l.is_convolutional()) acc += static_cast<double>(l.units);
        }
        return acc;
    };
    const double target = total_width(base.constructed) + 3.0;
    const GrowResult result = grow_to_performance(base, target, total_width, 100);
    CHECK(result.met_target);
    CHECK(result.increments == 3);
    CHECK(total_width(result.spec) == target);
}

TEST_CASE("grow_to_performance flags an exhausted budget with the best spec") {
    const EquivalenceReport base = build_equivalent(parse_topology(kDenoisePnn));
    const GrowResult result =
        grow_to_performance(base, 1e18, [](const NetworkSpec&) { return 0.0; }, 5);
    CHECK_FALSE(result.met_target);
    CHECK(result.increments == 5);
}

TEST_CASE("growing to the polynomial net's accuracy costs extra parameters") {
    // Noisy tone task at a small epoch budget: the parameter-matched plain
    // network lands below the polynomial network's accuracy, so the growth
    // loop has to add neurons and ends up with more parameters.
    ToneSpec tones = ToneSpec::defaults();
    tones.sample_rate = 8000.0;
    tones.duration_s = 0.1;
    LabeledSignals all = gen_tones(tones, 20, 555);
    for (std::size_t i = 0; i < all.signals.size(); ++i) {
        all.signals[i] = add_awgn(all.signals[i], 3.0, mix_seed(600, i));
    }
    LabeledSignals train_sig, test_sig;
    for (std::size_t i = 0; i < all.signals.size(); ++i) {
        auto& dst = (i % 4 == 3) ? test_sig : train_sig;
        dst.signals.push_back(all.signals[i]);
        dst.labels.push_back(all.labels[i]);
    }
    const WindowSpec window{200, 0.5, WindowFn::hamming};
    const auto train_set = classification_windows(train_sig, window, 8, false);
    const auto test_set = classification_windows(test_sig, window, 8, false);

    auto eval_spec = [&](const NetworkSpec& spec) {
        Network net(spec);
        net.init_params(999);
        TrainOptions opts;
        opts.lr = 1e-3;
        opts.epochs = 4;
        opts.batch = 32;
        opts.seed = 999;
        opts.threads = default_thread_count();
        train_network(net, train_set, {}, Loss{LossKind::categorical_cross_entropy}, opts,
                      nullptr, 0);
        return evaluate(net, test_set, Loss{LossKind::categorical_cross_entropy},
                        default_thread_count())
            .window_accuracy;
    };

    const NetworkSpec pnn_spec = parse_topology(
        "input 1 200\npnn 3 15 2 tanh\nmaxpool2\npnn 3 9 3 tanh\nmaxpool2\nflatten\ndense 8 "
        "softmax\n");
    const double target = eval_spec(pnn_spec);
    const EquivalenceReport base = build_equivalent(pnn_spec);
    const GrowResult grown = grow_to_performance(base, target, eval_spec, 16);

    CHECK(grown.met_target);
    CHECK(grown.increments > 0);
    CHECK(param_count(grown.spec) > base.constructed_params);
}
