// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "doctest.h"
#include "polywave/complexity.hpp"

using namespace polywave;

namespace {
// First layer of the complexity-estimation reference network.
const LayerDims kRefDims{100, 76, 2, 25};
}  // namespace

TEST_CASE("plain forward count follows the counting rule") {
    CHECK(cnn_forward_ops(kRefDims) == 7676);  // 76 * 99 + 76 + 76
    CHECK(cnn_forward_ops({1, 1, 1, 1}) == 3);

    const LayerDims doubled{kRefDims.m_prev * 2, kRefDims.m * 2, kRefDims.n_prev, kRefDims.k};
    CHECK(cnn_forward_ops(doubled) == 2 * cnn_forward_ops(kRefDims));
}

TEST_CASE("polynomial forward count collapses at degree 1 and adds the excess") {
    const std::int64_t base = cnn_forward_ops(kRefDims);
    CHECK(pnn_forward_ops(kRefDims, 1, base) == base);
    // Degree 2: 2 C_c + (1/2 * 100 * 2 * 2 - 2 * 76) = 2 C_c + 48.
    CHECK(pnn_forward_ops(kRefDims, 2, base) == 2 * base + 48);
}

TEST_CASE("forward count increases strictly with the degree") {
    const std::int64_t base = cnn_forward_ops(kRefDims);
    std::int64_t prev = pnn_forward_ops(kRefDims, 1, base);
    for (int d = 2; d <= 100; ++d) {
        const std::int64_t cur = pnn_forward_ops(kRefDims, d, base);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("forward count increases with input size and channels at degree 2") {
    const std::int64_t base = cnn_forward_ops(kRefDims);
    const std::int64_t at_ref = pnn_forward_ops(kRefDims, 2, base);
    LayerDims more_samples = kRefDims;
    more_samples.m_prev += 10;
    CHECK(pnn_forward_ops(more_samples, 2, base) > at_ref);
    LayerDims more_channels = kRefDims;
    more_channels.n_prev += 1;
    CHECK(pnn_forward_ops(more_channels, 2, base) > at_ref);
}

TEST_CASE("learning count collapses at degree 1 and matches the substitution") {
    CHECK(pnn_learning_ops(kRefDims, 1, 5000) == 5000);
    // Degree 2 with a symbolic base: 2 L_c + ((200 + 38) * 2 - 76) = 2 L_c + 400.
    CHECK(pnn_learning_ops(kRefDims, 2, 1000) == 2 * 1000 + 400);
}

TEST_CASE("learning stays at least as costly as forward under consistent bases") {
    const LayerDims next{76, 52, 10, 25};  // downstream layer of the reference net
    const std::int64_t fwd_base = cnn_forward_ops(kRefDims);
    const std::int64_t learn_base = cnn_learning_ops(kRefDims, next);
    CHECK(learn_base > fwd_base);
    for (int d = 1; d <= 100; ++d) {
        CHECK(pnn_learning_ops(kRefDims, d, learn_base) >= pnn_forward_ops(kRefDims, d, fwd_base));
    }
}

TEST_CASE("time curves start at t0 and never decrease") {
    const double t0 = 3.5e-6;
    const auto fwd = forward_time_curve(t0, kRefDims, 100);
    REQUIRE(fwd.size() == 100);
    CHECK(fwd[0] == doctest::Approx(t0));
    for (std::size_t i = 1; i < fwd.size(); ++i) CHECK(fwd[i] >= fwd[i - 1]);

    const auto learn = learning_time_curve(t0, kRefDims, 100);
    CHECK(learn[0] == doctest::Approx(t0));
    for (std::size_t i = 1; i < learn.size(); ++i) CHECK(learn[i] >= learn[i - 1]);

    const auto single = forward_time_curve(t0, kRefDims, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == doctest::Approx(t0));
}

TEST_CASE("bench rows keep measured and theoretical series on one degree grid") {
    const auto results = run_bench(3, 120, 77);
    REQUIRE(results.size() == 3);
    for (int d = 1; d <= 3; ++d) {
        const BenchResult& row = results[static_cast<std::size_t>(d - 1)];
        CHECK(row.degree == d);
        CHECK(row.pnn_fwd_s > 0.0);
        CHECK(row.cnn_fwd_s > 0.0);
        CHECK(row.equiv_fwd_s > 0.0);
        CHECK(row.theory_fwd_s > 0.0);
        CHECK(row.pnn_learn_s > 0.0);
        CHECK(row.theory_learn_s > 0.0);
    }
    const std::string csv = bench_csv(results);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "degree,cnn_fwd_s,pnn_fwd_s,equiv_fwd_s,theory_fwd_s,cnn_learn_s,pnn_learn_s,"
          "equiv_learn_s,theory_learn_s");
    int rows = 0;
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("degree-1 polynomial and plain variants run within 10 percent") {
    const auto results = run_bench(1, 400, 78);
    const BenchResult& row = results.front();
    const double ratio = row.pnn_fwd_s / row.cnn_fwd_s;
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
}
