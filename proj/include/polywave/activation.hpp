// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

namespace polywave {

enum class Act { identity, tanh, softsign, relu, swish, sigmoid, softmax };

/// Scalar activation with its derivative taken at the pre-activation value.
/// Softmax is the one vector-valued member; it is applied row-wise and its
/// derivative is never requested in isolation because it is only ever paired
/// with the cross-entropy loss (combined gradient y_hat - y).
struct Activation {
    Act id = Act::identity;

    double eval(double x) const;
    double deriv(double x) const;

    bool is_softmax() const { return id == Act::softmax; }

    /// In-place application over one row; handles the softmax normalization.
    void apply_row(const double* x, double* y, std::size_t n) const;

    std::string name() const;
    static Activation from_name(const std::string& name);
};

}  // namespace polywave
