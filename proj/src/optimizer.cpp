// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/optimizer.hpp"

#include <cmath>

#include "polywave/errors.hpp"

namespace polywave {

GradientBundle zero_bundle(const Network& net) {
    GradientBundle b;
    b.reserve(net.layer_count());
    for (std::size_t i = 0; i < net.layer_count(); ++i) b.push_back(net.layer(i).zero_grads());
    return b;
}

std::size_t bundle_scalar_count(const GradientBundle& b) {
    std::size_t n = 0;
    for (const LayerGrads& g : b) n += g.weights.size() + g.biases.size();
    return n;
}

void bundle_add_scaled(GradientBundle& acc, const GradientBundle& g, double a) {
    if (acc.size() != g.size()) throw DimensionError("bundle_add_scaled: layer count mismatch");
    for (std::size_t l = 0; l < acc.size(); ++l) {
        if (acc[l].weights.size() != g[l].weights.size() ||
            acc[l].biases.size() != g[l].biases.size()) {
            throw DimensionError("bundle_add_scaled: shape mismatch");
        }
        for (std::size_t i = 0; i < g[l].weights.size(); ++i) {
            acc[l].weights[i] += a * g[l].weights[i];
        }
        for (std::size_t i = 0; i < g[l].biases.size(); ++i) acc[l].biases[i] += a * g[l].biases[i];
    }
}

void bundle_scale(GradientBundle& b, double a) {
    for (LayerGrads& g : b) {
        for (double& v : g.weights) v *= a;
        for (double& v : g.biases) v *= a;
    }
}

double bundle_sq_norm(const GradientBundle& b) {
    double acc = 0.0;
    for (const LayerGrads& g : b) {
        for (double v : g.weights) acc += v * v;
        for (double v : g.biases) acc += v * v;
    }
    return acc;
}

bool bundle_all_finite(const GradientBundle& b) {
    for (const LayerGrads& g : b) {
        for (double v : g.weights) {
            if (!std::isfinite(v)) return false;
        }
        for (double v : g.biases) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

static void check_bundle(const Network& net, const GradientBundle& grads) {
    if (grads.size() != net.layer_count()) throw DimensionError("optimizer: bundle layer mismatch");
    for (std::size_t l = 0; l < grads.size(); ++l) {
        if (grads[l].weights.size() != net.layer(l).weights().size() ||
            grads[l].biases.size() != net.layer(l).biases().size()) {
            throw DimensionError("optimizer: bundle shape mismatch");
        }
    }
}

void sgd_step(Network& net, const GradientBundle& grads, SgdState& state) {
    check_bundle(net, grads);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        auto w = net.layer(l).weights();
        auto b = net.layer(l).biases();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= state.lr * grads[l].weights[i];
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= state.lr * grads[l].biases[i];
    }
}

void adam_step(Network& net, const GradientBundle& grads, AdamState& state) {
    check_bundle(net, grads);
    if (state.m.empty()) {
        state.m = zero_bundle(net);
        state.v = zero_bundle(net);
    }
    state.t += 1;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

    auto update = [&](std::span<double> theta, Vec& m, Vec& v, const Vec& g) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            theta[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
    };

    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        update(net.layer(l).weights(), state.m[l].weights, state.v[l].weights, grads[l].weights);
        update(net.layer(l).biases(), state.m[l].biases, state.v[l].biases, grads[l].biases);
    }
}

}  // namespace polywave
