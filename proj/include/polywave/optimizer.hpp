// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "polywave/layer.hpp"
#include "polywave/network.hpp"

namespace polywave {

/// Per-layer gradients for a whole network, aligned with its layers.
using GradientBundle = std::vector<LayerGrads>;

GradientBundle zero_bundle(const Network& net);
std::size_t bundle_scalar_count(const GradientBundle& b);
void bundle_add_scaled(GradientBundle& acc, const GradientBundle& g, double a);
void bundle_scale(GradientBundle& b, double a);
double bundle_sq_norm(const GradientBundle& b);
bool bundle_all_finite(const GradientBundle& b);

/// Plain gradient descent: theta <- theta - lr * g.
struct SgdState {
    double lr = 1e-3;
};

void sgd_step(Network& net, const GradientBundle& grads, SgdState& state);

/// Adam with bias correction; moment buffers are allocated on first use.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    GradientBundle m;
    GradientBundle v;
    long t = 0;
};

void adam_step(Network& net, const GradientBundle& grads, AdamState& state);

}  // namespace polywave
