// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polywave {

/// Dimensions of one convolution layer for the operation counters.
struct LayerDims {
    std::size_t m_prev = 0;  // input samples
    std::size_t m = 0;       // output samples (m_prev - k + 1 in valid mode)
    std::size_t n_prev = 0;  // input channels
    std::size_t k = 0;       // kernel taps
};

/// Operations of one plain-convolution neuron's forward pass under the
/// no-optimization counting rule: one multiply and one add per tap across
/// every output sample, plus the bias add and the activation per sample.
std::int64_t cnn_forward_ops(const LayerDims& dims);

/// Polynomial neuron forward count relative to the plain one:
/// D C_c + (D - 1)(M_prev N_prev D / 2 - 2 M).
std::int64_t pnn_forward_ops(const LayerDims& dims, int degree, std::int64_t cnn_ops);

/// Polynomial neuron learning-cycle count relative to the plain one:
/// D L_c + (D - 1)((M_prev N_prev + M / 2) D - M).
std::int64_t pnn_learning_ops(const LayerDims& dims, int degree, std::int64_t cnn_learning_ops);

/// Plain-convolution learning-cycle count for an inner neuron: forward pass,
/// output-gradient spread from the downstream layer, weight gradients, bias
/// gradient and the parameter updates, under the same counting rule.
std::int64_t cnn_learning_ops(const LayerDims& dims, const LayerDims& next);

/// Seconds per degree in [1, d_max] extrapolated from the degree-1 time t0:
/// T(D) = D t0 + (D - 1)(c1 D - c2) t, with t = t0 / (c1 + c2) chosen so the
/// curve never decreases. Forward uses c1 = M_prev N_prev / 2, c2 = 2 M; the
/// learning variant substitutes c1 = M_prev N_prev + M / 2, c2 = M.
std::vector<double> forward_time_curve(double t0, const LayerDims& dims, int d_max);
std::vector<double> learning_time_curve(double t0, const LayerDims& dims, int d_max);

struct BenchResult {
    int degree = 1;
    double cnn_fwd_s = 0.0;
    double pnn_fwd_s = 0.0;
    double equiv_fwd_s = 0.0;
    double theory_fwd_s = 0.0;
    double cnn_learn_s = 0.0;
    double pnn_learn_s = 0.0;
    double equiv_learn_s = 0.0;
    double theory_learn_s = 0.0;
};

/// Reference two-layer micro-benchmark (input 2x100, first layer 10 neurons
/// with 25 taps, degree-1 output neuron with 25 taps). For every degree the
/// polynomial, plain and parameter-matched variants run `reps` forward passes
/// and learning cycles; the output layer's time is measured separately and
/// deducted, and the remainder is divided by the first-layer neuron count.
/// The first tenth of the repetitions is warm-up and dropped from the means.
std::vector<BenchResult> run_bench(int d_max, int reps, std::uint64_t seed);

std::string bench_csv(const std::vector<BenchResult>& results);

}  // namespace polywave
