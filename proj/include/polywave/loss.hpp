// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "polywave/tensor.hpp"

namespace polywave {

enum class LossKind { mse, categorical_cross_entropy };

/// Differentiable losses. `grad` is the true derivative of `eval` with
/// respect to the prediction; the softmax/cross-entropy fusion lives in the
/// backward sweep, not here.
struct Loss {
    LossKind kind = LossKind::mse;

    /// mse: mean of squared error over all entries (per-signal sample count).
    /// cross-entropy: -sum target * log(pred), predictions clamped away from 0.
    double eval(const Mat& target, const Mat& pred) const;
    Mat grad(const Mat& target, const Mat& pred) const;

    std::string name() const;
    static Loss from_name(const std::string& name);
};

}  // namespace polywave
