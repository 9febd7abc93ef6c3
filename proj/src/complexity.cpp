// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/complexity.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "polywave/equivalence.hpp"
#include "polywave/loss.hpp"
#include "polywave/network.hpp"
#include "polywave/rng.hpp"
#include "polywave/training.hpp"

namespace polywave {

namespace {
using i64 = std::int64_t;

void check_dims(const LayerDims& d) {
    if (d.m_prev < 1 || d.m < 1 || d.n_prev < 1 || d.k < 1) {
        throw std::invalid_argument("layer dims must be positive");
    }
}
}  // namespace

std::int64_t cnn_forward_ops(const LayerDims& dims) {
    check_dims(dims);
    const i64 m = static_cast<i64>(dims.m);
    const i64 taps = static_cast<i64>(dims.n_prev) * static_cast<i64>(dims.k);
    return m * (2 * taps - 1) + m + m;  // dot products, bias adds, activations
}

std::int64_t pnn_forward_ops(const LayerDims& dims, int degree, std::int64_t cnn_ops) {
    check_dims(dims);
    if (degree < 1) throw std::invalid_argument("degree must be >= 1");
    const i64 d = degree;
    const i64 extra_num = static_cast<i64>(dims.m_prev) * static_cast<i64>(dims.n_prev) * d -
                          4 * static_cast<i64>(dims.m);
    return d * cnn_ops + (d - 1) * extra_num / 2;
}

std::int64_t pnn_learning_ops(const LayerDims& dims, int degree, std::int64_t cnn_learning_ops) {
    check_dims(dims);
    if (degree < 1) throw std::invalid_argument("degree must be >= 1");
    const i64 d = degree;
    const i64 extra_num = 2 * static_cast<i64>(dims.m_prev) * static_cast<i64>(dims.n_prev) * d +
                          static_cast<i64>(dims.m) * (d - 2);
    return d * cnn_learning_ops + (d - 1) * extra_num / 2;
}

std::int64_t cnn_learning_ops(const LayerDims& dims, const LayerDims& next) {
    check_dims(dims);
    check_dims(next);
    const i64 m = static_cast<i64>(dims.m);
    const i64 taps = static_cast<i64>(dims.n_prev) * static_cast<i64>(dims.k);
    const i64 n_next = static_cast<i64>(next.n_prev);  // neurons of the downstream layer
    const i64 k_next = static_cast<i64>(next.k);

    const i64 forward = cnn_forward_ops(dims);
    const i64 output_grad = m * (n_next * (2 * k_next - 1) + (n_next - 1));
    const i64 preact_grad = 2 * m;  // activation derivative and product
    const i64 weight_grad = taps * (2 * m - 1);
    const i64 bias_grad = m - 1;
    const i64 updates = 2 * taps + 2;
    return forward + output_grad + preact_grad + weight_grad + bias_grad + updates;
}

static std::vector<double> time_curve(double t0, double c1, double c2, int d_max) {
    if (t0 <= 0.0) throw std::invalid_argument("time curve: t0 must be positive");
    if (d_max < 1) throw std::invalid_argument("time curve: degree range must start at 1");
    const double t = t0 / (c1 + c2);
    std::vector<double> curve(static_cast<std::size_t>(d_max));
    for (int d = 1; d <= d_max; ++d) {
        const double dd = static_cast<double>(d);
        curve[static_cast<std::size_t>(d - 1)] = dd * t0 + (dd - 1.0) * (c1 * dd - c2) * t;
    }
    return curve;
}

std::vector<double> forward_time_curve(double t0, const LayerDims& dims, int d_max) {
    check_dims(dims);
    const double c1 = 0.5 * static_cast<double>(dims.m_prev) * static_cast<double>(dims.n_prev);
    const double c2 = 2.0 * static_cast<double>(dims.m);
    return time_curve(t0, c1, c2, d_max);
}

std::vector<double> learning_time_curve(double t0, const LayerDims& dims, int d_max) {
    check_dims(dims);
    const double c1 = static_cast<double>(dims.m_prev) * static_cast<double>(dims.n_prev) +
                      0.5 * static_cast<double>(dims.m);
    const double c2 = static_cast<double>(dims.m);
    return time_curve(t0, c1, c2, d_max);
}

// ---------------------------------------------------------------------------
// Micro-benchmark

namespace {

constexpr std::size_t kBenchInChannels = 2;
constexpr std::size_t kBenchInSamples = 100;
constexpr std::size_t kBenchWidth = 10;
constexpr std::size_t kBenchKernel = 25;
constexpr std::size_t kBenchMid = 76;  // 100 - 25 + 1
constexpr std::size_t kBenchOut = 52;  // 76 - 25 + 1

NetworkSpec two_layer_spec(std::size_t width, int degree) {
    NetworkSpec spec;
    spec.in_channels = kBenchInChannels;
    spec.in_samples = kBenchInSamples;
    spec.layers.push_back({LayerKind::pnn, width, kBenchKernel, degree, Act::tanh});
    spec.layers.push_back({LayerKind::pnn, 1, kBenchKernel, 1, Act::tanh});
    return spec;
}

NetworkSpec output_only_spec(std::size_t in_channels) {
    NetworkSpec spec;
    spec.in_channels = in_channels;
    spec.in_samples = kBenchMid;
    spec.layers.push_back({LayerKind::pnn, 1, kBenchKernel, 1, Act::tanh});
    return spec;
}

Mat random_input(std::size_t channels, std::size_t samples, Rng& rng) {
    Mat m(channels, samples);
    for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
    return m;
}

double trimmed_mean_seconds(std::vector<double> reps) {
    // Drop the warm-up repetitions, then trim a tenth off both tails so a
    // stray scheduler preemption cannot swamp a microsecond-scale mean.
    const std::size_t warmup = reps.size() / 10;
    reps.erase(reps.begin(), reps.begin() + static_cast<std::ptrdiff_t>(warmup));
    std::sort(reps.begin(), reps.end());
    const std::size_t tail = reps.size() / 10;
    double acc = 0.0;
    for (std::size_t i = tail; i < reps.size() - tail; ++i) acc += reps[i];
    return acc / static_cast<double>(reps.size() - 2 * tail);
}

template <class Fn>
double time_reps(int reps, Fn&& fn) {
    using clock = std::chrono::steady_clock;
    std::vector<double> times(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        const auto start = clock::now();
        fn();
        times[static_cast<std::size_t>(r)] =
            std::chrono::duration<double>(clock::now() - start).count();
    }
    return trimmed_mean_seconds(times);
}

struct VariantTimes {
    double fwd_s = 0.0;
    double learn_s = 0.0;
};

VariantTimes time_variant(std::size_t width, int degree, int reps, std::uint64_t seed) {
    Rng rng(mix_seed(seed, width * 131 + static_cast<std::size_t>(degree)));

    Network net(two_layer_spec(width, degree));
    net.init_params(rng.next_u64());
    Network out_only(output_only_spec(width));
    out_only.init_params(rng.next_u64());

    const Mat input = random_input(kBenchInChannels, kBenchInSamples, rng);
    const Mat mid_input = random_input(width, kBenchMid, rng);
    Mat target(1, kBenchOut);
    for (double& v : target.values()) v = rng.uniform(-0.5, 0.5);

    const double full_fwd = time_reps(reps, [&] { net.forward(input); });
    const double out_fwd = time_reps(reps, [&] { out_only.forward(mid_input); });

    const Loss loss{LossKind::mse};
    auto learn_cycle = [&](Network& target_net, const Mat& in) {
        const Sample sample{in, target};
        std::vector<Sample> batch{sample};
        const auto caches = forward_batch(target_net, batch, 1);
        GradientBundle grads = backward_sweep(target_net, batch, caches, loss);
        SgdState sgd{1e-9};  // keep the weights effectively frozen across reps
        sgd_step(target_net, grads, sgd);
    };
    const double full_learn = time_reps(reps, [&] { learn_cycle(net, input); });
    const double out_learn = time_reps(reps, [&] { learn_cycle(out_only, mid_input); });

    const double n1 = static_cast<double>(width);
    return {std::max(0.0, (full_fwd - out_fwd) / n1), std::max(0.0, (full_learn - out_learn) / n1)};
}

}  // namespace

std::vector<BenchResult> run_bench(int d_max, int reps, std::uint64_t seed) {
    if (d_max < 1) throw std::invalid_argument("run_bench: degree range must start at 1");
    if (reps < 100) throw std::invalid_argument("run_bench: need at least 100 repetitions");

    const LayerDims dims{kBenchInSamples, kBenchMid, kBenchInChannels, kBenchKernel};

    std::vector<BenchResult> results(static_cast<std::size_t>(d_max));
    // The plain variant does not depend on the degree; time it once.
    const VariantTimes cnn = time_variant(kBenchWidth, 1, reps, mix_seed(seed, 2));
    for (int d = 1; d <= d_max; ++d) {
        BenchResult& row = results[static_cast<std::size_t>(d - 1)];
        row.degree = d;
        const VariantTimes pnn = time_variant(kBenchWidth, d, reps, seed);
        const std::size_t equiv_width =
            equivalent_inner_width(kBenchWidth, kBenchInChannels, kBenchKernel, d,
                                   kBenchInChannels);
        const VariantTimes equiv = time_variant(equiv_width, 1, reps, mix_seed(seed, 3));
        row.pnn_fwd_s = pnn.fwd_s;
        row.pnn_learn_s = pnn.learn_s;
        row.cnn_fwd_s = cnn.fwd_s;
        row.cnn_learn_s = cnn.learn_s;
        row.equiv_fwd_s = equiv.fwd_s;
        row.equiv_learn_s = equiv.learn_s;
    }

    // Theoretical series share the measured degree grid and extrapolate from
    // the degree-1 plain-convolution times.
    const double t0_fwd = std::max(results.front().cnn_fwd_s, 1e-12);
    const double t0_learn = std::max(results.front().cnn_learn_s, 1e-12);
    const std::vector<double> fwd_curve = forward_time_curve(t0_fwd, dims, d_max);
    const std::vector<double> learn_curve = learning_time_curve(t0_learn, dims, d_max);
    for (int d = 1; d <= d_max; ++d) {
        results[static_cast<std::size_t>(d - 1)].theory_fwd_s =
            fwd_curve[static_cast<std::size_t>(d - 1)];
        results[static_cast<std::size_t>(d - 1)].theory_learn_s =
            learn_curve[static_cast<std::size_t>(d - 1)];
    }
    return results;
}

std::string bench_csv(const std::vector<BenchResult>& results) {
    std::ostringstream out;
    out << "degree,cnn_fwd_s,pnn_fwd_s,equiv_fwd_s,theory_fwd_s,"
           "cnn_learn_s,pnn_learn_s,equiv_learn_s,theory_learn_s\n";
    out.precision(12);
    for (const BenchResult& r : results) {
        out << r.degree << "," << r.cnn_fwd_s << "," << r.pnn_fwd_s << "," << r.equiv_fwd_s << ","
            << r.theory_fwd_s << "," << r.cnn_learn_s << "," << r.pnn_learn_s << ","
            << r.equiv_learn_s << "," << r.theory_learn_s << "\n";
    }
    return out.str();
}

}  // namespace polywave
