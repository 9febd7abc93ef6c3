// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/activation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polywave {

static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double Activation::eval(double x) const {
    switch (id) {
        case Act::identity: return x;
        case Act::tanh: return std::tanh(x);
        case Act::softsign: return x / (1.0 + std::fabs(x));
        case Act::relu: return x > 0.0 ? x : 0.0;
        case Act::swish: return x * sigmoid(x);
        case Act::sigmoid: return sigmoid(x);
        case Act::softmax: break;
    }
    throw std::logic_error("softmax has no scalar eval");
}

double Activation::deriv(double x) const {
    switch (id) {
        case Act::identity: return 1.0;
        case Act::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Act::softsign: {
            const double a = 1.0 + std::fabs(x);
            return 1.0 / (a * a);
        }
        case Act::relu: return x > 0.0 ? 1.0 : 0.0;
        case Act::swish: {
            const double s = sigmoid(x);
            return s * (1.0 + x * (1.0 - s));
        }
        case Act::sigmoid: {
            const double s = sigmoid(x);
            return s * (1.0 - s);
        }
        case Act::softmax: break;
    }
    throw std::logic_error("softmax derivative is fused with cross-entropy");
}

void Activation::apply_row(const double* x, double* y, std::size_t n) const {
    if (id == Act::softmax) {
        double mx = x[0];
        for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, x[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = std::exp(x[i] - mx);
            sum += y[i];
        }
        for (std::size_t i = 0; i < n; ++i) y[i] /= sum;
        return;
    }
    for (std::size_t i = 0; i < n; ++i) y[i] = eval(x[i]);
}

std::string Activation::name() const {
    switch (id) {
        case Act::identity: return "identity";
        case Act::tanh: return "tanh";
        case Act::softsign: return "softsign";
        case Act::relu: return "relu";
        case Act::swish: return "swish";
        case Act::sigmoid: return "sigmoid";
        case Act::softmax: return "softmax";
    }
    return "identity";
}

Activation Activation::from_name(const std::string& name) {
    if (name == "identity") return {Act::identity};
    if (name == "tanh") return {Act::tanh};
    if (name == "softsign") return {Act::softsign};
    if (name == "relu") return {Act::relu};
    if (name == "swish") return {Act::swish};
    if (name == "sigmoid") return {Act::sigmoid};
    if (name == "softmax") return {Act::softmax};
    throw std::invalid_argument("unknown activation: " + name);
}

}  // namespace polywave
