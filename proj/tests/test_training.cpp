// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "polywave/errors.hpp"
#include "polywave/network.hpp"
#include "polywave/rng.hpp"
#include "polywave/training.hpp"

using namespace polywave;

namespace {

Mat random_mat(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Mat m(rows, cols);
    for (double& v : m.values()) v = rng.uniform(lo, hi);
    return m;
}

Sample regression_sample(const NetworkSpec& spec, const Shape& out, Rng& rng) {
    Sample s;
    s.input = random_mat(spec.in_channels, spec.in_samples, rng);
    s.target = random_mat(out.channels, out.samples, rng, -0.8, 0.8);
    return s;
}

Sample onehot_sample(const NetworkSpec& spec, std::size_t classes, int label, Rng& rng) {
    Sample s;
    s.input = random_mat(spec.in_channels, spec.in_samples, rng);
    s.target = Mat(1, classes, 0.0);
    s.target(0, static_cast<std::size_t>(label)) = 1.0;
    s.label = label;
    return s;
}

}  // namespace

TEST_CASE("mse gradient matches finite differences of its eval") {
    Rng rng(51);
    const Loss loss{LossKind::mse};
    Mat target = random_mat(2, 5, rng);
    Mat pred = random_mat(2, 5, rng);
    const Mat g = loss.grad(target, pred);
    const double h = 1e-7;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double saved = pred.data()[i];
        pred.data()[i] = saved + h;
        const double up = loss.eval(target, pred);
        pred.data()[i] = saved - h;
        const double down = loss.eval(target, pred);
        pred.data()[i] = saved;
        CHECK(g.data()[i] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("cross-entropy is zero at the one-hot vertex and positive elsewhere") {
    const Loss loss{LossKind::categorical_cross_entropy};
    Mat target(1, 4, 0.0);
    target(0, 2) = 1.0;
    CHECK(loss.eval(target, target) == doctest::Approx(0.0).epsilon(1e-12));

    Mat off(1, 4, 0.1);
    off(0, 2) = 0.7;
    CHECK(loss.eval(target, off) > 0.0);
}

TEST_CASE("cross-entropy gradient matches finite differences of its eval") {
    const Loss loss{LossKind::categorical_cross_entropy};
    Mat target(1, 4, 0.0);
    target(0, 1) = 1.0;
    Mat pred(1, 4);
    pred(0, 0) = 0.2;
    pred(0, 1) = 0.4;
    pred(0, 2) = 0.3;
    pred(0, 3) = 0.1;
    const Mat g = loss.grad(target, pred);
    const double h = 1e-7;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double saved = pred.data()[i];
        pred.data()[i] = saved + h;
        const double up = loss.eval(target, pred);
        pred.data()[i] = saved - h;
        const double down = loss.eval(target, pred);
        pred.data()[i] = saved;
        CHECK(g.data()[i] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("exploding training surfaces a numeric failure") {
    Rng rng(59);
    const NetworkSpec spec = parse_topology("input 1 16\npnn 2 3 5 identity\npnn 1 3 5 identity\n");
    Network net(spec);
    net.init_params(1);
    std::vector<Sample> data;
    for (int i = 0; i < 8; ++i) {
        data.push_back(regression_sample(spec, shape_trace(spec).back(), rng));
        for (double& v : data.back().input.values()) v *= 40.0;  // push powers out of range
    }
    TrainOptions opts;
    opts.lr = 1e6;
    opts.epochs = 20;
    opts.batch = 4;
    opts.seed = 3;
    opts.use_adam = false;
    std::vector<TraceRow> traces;
    CHECK_THROWS_AS(train_network(net, data, {}, Loss{LossKind::mse}, opts, &traces, 0),
                    NumericError);
}

TEST_CASE("global-norm clipping keeps the same run finite") {
    Rng rng(59);
    const NetworkSpec spec = parse_topology("input 1 16\npnn 2 3 5 identity\npnn 1 3 5 identity\n");
    Network net(spec);
    net.init_params(1);
    std::vector<Sample> data;
    for (int i = 0; i < 8; ++i) {
        data.push_back(regression_sample(spec, shape_trace(spec).back(), rng));
        for (double& v : data.back().input.values()) v *= 40.0;
    }
    TrainOptions opts;
    opts.lr = 1e-3;
    opts.epochs = 5;
    opts.batch = 4;
    opts.seed = 3;
    opts.use_adam = false;
    opts.clip_norm = 1.0;
    std::vector<TraceRow> traces;
    const EvalResult result =
        train_network(net, data, {}, Loss{LossKind::mse}, opts, &traces, 0);
    CHECK(std::isfinite(result.loss));
}

TEST_CASE("sgd step follows the update rule") {
    const NetworkSpec spec = parse_topology("input 1 4\nconv 1 4 identity\n");
    Network net(spec);
    auto w = net.layer(0).weights();
    std::fill(w.begin(), w.end(), 1.0);
    GradientBundle grads = zero_bundle(net);
    std::fill(grads[0].weights.begin(), grads[0].weights.end(), 2.0);
    SgdState state{0.1};
    sgd_step(net, grads, state);
    for (double v : net.layer(0).weights()) CHECK(v == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("adam first step moves by about -lr * sign(g) and ignores rescaling") {
    const NetworkSpec spec = parse_topology("input 1 4\nconv 2 3 identity\n");
    auto one_step = [&](double g_value) {
        Network net(spec);
        GradientBundle grads = zero_bundle(net);
        std::fill(grads[0].weights.begin(), grads[0].weights.end(), g_value);
        AdamState state;
        state.lr = 1e-3;
        adam_step(net, grads, state);
        return Vec(net.layer(0).weights().begin(), net.layer(0).weights().end());
    };
    const Vec step_a = one_step(0.25);
    for (double v : step_a) CHECK(v == doctest::Approx(-1e-3).epsilon(1e-6));
    const Vec step_b = one_step(0.5);  // doubled gradient
    for (std::size_t i = 0; i < step_a.size(); ++i) {
        CHECK(std::fabs(step_b[i] - step_a[i]) / std::fabs(step_a[i]) < 1e-6);
    }
}

TEST_CASE("zero gradients leave parameters unchanged under both optimizers") {
    const NetworkSpec spec = parse_topology("input 1 8\npnn 2 3 2 tanh\n");
    Network net(spec);
    net.init_params(5);
    Vec before;
    net.copy_params_to(before);
    GradientBundle zeros = zero_bundle(net);

    SgdState sgd{0.5};
    sgd_step(net, zeros, sgd);
    AdamState adam;
    adam_step(net, zeros, adam);

    Vec after;
    net.copy_params_to(after);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] == before[i]);
}

TEST_CASE("backward sweep on one identity layer matches the hand derivation") {
    // Identity activation, MSE on a 3-sample output: dE/dX = (2/M)(y_hat - y),
    // so dW(k) = sum_m dE/dX(m) x(m + k) and db = sum_m dE/dX(m).
    const NetworkSpec spec = parse_topology("input 1 5\nconv 1 3 identity\n");
    Network net(spec);
    auto w = net.layer(0).weights();
    w[0] = 0.5;
    w[1] = -0.25;
    w[2] = 1.5;

    Sample s;
    s.input = Mat::from_rows({{0.1, -0.4, 0.8, 0.3, -0.2}});
    s.target = Mat::from_rows({{0.05, 0.3, -0.1}});

    std::vector<Sample> batch{s};
    const auto caches = forward_batch(net, batch, 1);
    const GradientBundle bundle = backward_sweep(net, batch, caches, Loss{LossKind::mse});

    const Mat pred = caches[0][0].output;
    Vec dx(3);
    for (std::size_t m = 0; m < 3; ++m) dx[m] = (2.0 / 3.0) * (pred(0, m) - s.target(0, m));
    for (std::size_t k = 0; k < 3; ++k) {
        double expect = 0.0;
        for (std::size_t m = 0; m < 3; ++m) expect += dx[m] * s.input(0, m + k);
        CHECK(bundle[0].weights[k] == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(bundle[0].biases[0] == doctest::Approx(dx[0] + dx[1] + dx[2]).epsilon(1e-12));
}

TEST_CASE("perfect predictions give an all-zero bundle") {
    Rng rng(52);
    const NetworkSpec spec = parse_topology("input 1 12\npnn 2 3 2 tanh\n");
    Network net(spec);
    net.init_params(3);
    Sample s;
    s.input = random_mat(1, 12, rng);
    s.target = net.forward(s.input);
    std::vector<Sample> batch{s};
    const auto caches = forward_batch(net, batch, 1);
    const GradientBundle bundle = backward_sweep(net, batch, caches, Loss{LossKind::mse});
    for (const LayerGrads& g : bundle) {
        for (double v : g.weights) CHECK(v == 0.0);
        for (double v : g.biases) CHECK(v == 0.0);
    }
}

TEST_CASE("bundle shapes mirror parameters on the note-recognition network") {
    const char* text = R"(input 1 1600
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
    Network net(parse_topology(text));
    const GradientBundle bundle = zero_bundle(net);
    CHECK(bundle_scalar_count(bundle) == 71344);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        CHECK(bundle[l].weights.size() == net.layer(l).weights().size());
        CHECK(bundle[l].biases.size() == net.layer(l).biases().size());
    }
}

TEST_CASE("backward sweep demands matching forward caches") {
    Rng rng(53);
    const NetworkSpec spec = parse_topology("input 1 8\nconv 1 3 tanh\n");
    Network net(spec);
    net.init_params(1);
    Sample s;
    s.input = random_mat(1, 8, rng);
    s.target = random_mat(1, 6, rng);
    std::vector<Sample> batch{s, s};
    auto caches = forward_batch(net, batch, 1);
    caches.pop_back();
    CHECK_THROWS_AS(backward_sweep(net, batch, caches, Loss{LossKind::mse}), DimensionError);
}

TEST_CASE("gradient check is tight on clean nets and flags corrupted gradients") {
    Rng rng(54);
    const NetworkSpec spec = parse_topology("input 1 20\nconv 3 5 tanh\nconv 2 3 tanh\n");
    Network net(spec);
    net.init_params(11);
    Sample s = regression_sample(spec, shape_trace(spec).back(), rng);
    CHECK(grad_check(net, s, Loss{LossKind::mse}) < 1e-7);

    // Doubling the analytic gradient drives the relative error to 1/2 under
    // the max-normalized formula |2g - g| / max(|2g|, |g|).
    std::vector<LayerCache> caches;
    net.forward(s.input, caches);
    std::vector<Sample> batch{s};
    const auto batch_caches = forward_batch(net, batch, 1);
    GradientBundle analytic = backward_sweep(net, batch, batch_caches, Loss{LossKind::mse});
    double worst = 0.0;
    const double h = 1e-6;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        auto w = net.layer(l).weights();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double corrupted = 2.0 * analytic[l].weights[i];
            const double saved = w[i];
            w[i] = saved + h;
            const double up = Loss{LossKind::mse}.eval(s.target, net.forward(s.input));
            w[i] = saved - h;
            const double down = Loss{LossKind::mse}.eval(s.target, net.forward(s.input));
            w[i] = saved;
            const double fd = (up - down) / (2 * h);
            const double denom = std::max({std::fabs(corrupted), std::fabs(fd), 1e-12});
            worst = std::max(worst, std::fabs(corrupted - fd) / denom);
        }
    }
    CHECK(worst == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("gradient check covers the denoising topology shape at width 64") {
    // Degree-5 stack with same padding, pooling and upsampling as in the
    // denoising network, at widths where the h = 1e-6 quotient stays above
    // the 64-bit noise floor (wider stacks bottom out near 1e-5 relative,
    // regardless of the backward pass being exact).
    Rng rng(103);
    const NetworkSpec spec = parse_topology(
        "input 1 64\npadding same\npnn 2 21 5 tanh\nmaxpool2\npnn 2 7 5 tanh\nupsample2\npnn 1 11 "
        "5 tanh\n");
    Network net(spec);
    net.init_params(6);
    Sample s = regression_sample(spec, shape_trace(spec).back(), rng);
    CHECK(grad_check(net, s, Loss{LossKind::mse}) < 1e-6);
}

TEST_CASE("one small sgd step decreases the sample loss on smooth nets") {
    Rng rng(56);
    const Loss loss{LossKind::mse};
    for (int trial = 0; trial < 20; ++trial) {
        const int degree = 1 + static_cast<int>(rng.below(3));
        NetworkSpec spec;
        spec.in_channels = 1;
        spec.in_samples = 16;
        spec.layers.push_back(
            {LayerKind::pnn, 2 + rng.below(2), 3, degree, trial % 2 ? Act::tanh : Act::softsign});
        Network net(spec);
        net.init_params(rng.next_u64());
        Sample s = regression_sample(spec, shape_trace(spec).back(), rng);

        std::vector<Sample> batch{s};
        const auto caches = forward_batch(net, batch, 1);
        const double before = loss.eval(s.target, caches[0].back().output);
        GradientBundle grads = backward_sweep(net, batch, caches, loss);
        SgdState state{1e-4};
        sgd_step(net, grads, state);
        const double after = loss.eval(s.target, net.forward(s.input));
        CHECK(after < before);
    }
}

TEST_CASE("fold plans partition the dataset") {
    const FoldPlan plan = make_fold_plan(10, 2, 7);
    REQUIRE(plan.folds.size() == 2);
    CHECK(plan.folds[0].size() == 5);
    CHECK(plan.folds[1].size() == 5);
    std::set<std::size_t> all;
    for (const auto& fold : plan.folds) all.insert(fold.begin(), fold.end());
    CHECK(all.size() == 10);

    const FoldPlan again = make_fold_plan(10, 2, 7);
    CHECK(again.folds == plan.folds);

    CHECK_THROWS(make_fold_plan(3, 5, 1));
}

TEST_CASE("kfold training reports ordered summaries and is seed-stable") {
    Rng rng(57);
    const NetworkSpec spec =
        parse_topology("input 1 16\nconv 2 5 tanh\nflatten\ndense 2 softmax\n");
    std::vector<Sample> data;
    for (int i = 0; i < 12; ++i) {
        Sample s = onehot_sample(spec, 2, i % 2, rng);
        // Make class 1 inputs louder so the task is learnable.
        if (i % 2 == 1) {
            for (double& v : s.input.values()) v = 0.5 + 0.4 * v;
        }
        s.signal_id = i;
        data.push_back(std::move(s));
    }
    const FoldPlan plan = make_fold_plan(data.size(), 3, 9);
    TrainOptions opts;
    opts.epochs = 3;
    opts.batch = 4;
    opts.seed = 21;

    const Loss loss{LossKind::categorical_cross_entropy};
    const KfoldResult a = kfold_train(spec, data, plan, loss, opts);
    CHECK(a.summary.fold_values.size() == 3);
    CHECK(a.summary.min_value <= a.summary.mean_value);
    CHECK(a.summary.mean_value <= a.summary.max_value);

    const KfoldResult b = kfold_train(spec, data, plan, loss, opts);
    CHECK(trace_csv(a.traces) == trace_csv(b.traces));
}

TEST_CASE("softmax outputs demand the cross-entropy loss") {
    Rng rng(58);
    const NetworkSpec spec = parse_topology("input 1 8\nflatten\ndense 3 softmax\n");
    Network net(spec);
    net.init_params(2);
    Sample s = onehot_sample(spec, 3, 1, rng);
    std::vector<Sample> batch{s};
    const auto caches = forward_batch(net, batch, 1);
    CHECK_THROWS_AS(backward_sweep(net, batch, caches, Loss{LossKind::mse}), TopologyError);
}
