// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polywave/errors.hpp"

namespace polywave {

namespace {
constexpr double kProbFloor = 1e-15;
}

double Loss::eval(const Mat& target, const Mat& pred) const {
    if (target.rows() != pred.rows() || target.cols() != pred.cols()) {
        throw DimensionError("loss: target/prediction shape mismatch");
    }
    if (kind == LossKind::mse) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double d = pred.data()[i] - target.data()[i];
            acc += d * d;
        }
        return acc / static_cast<double>(pred.size());
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        acc -= target.data()[i] * std::log(std::max(pred.data()[i], kProbFloor));
    }
    return acc;
}

Mat Loss::grad(const Mat& target, const Mat& pred) const {
    if (target.rows() != pred.rows() || target.cols() != pred.cols()) {
        throw DimensionError("loss: target/prediction shape mismatch");
    }
    Mat g(pred.rows(), pred.cols());
    if (kind == LossKind::mse) {
        const double scale = 2.0 / static_cast<double>(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            g.data()[i] = scale * (pred.data()[i] - target.data()[i]);
        }
        return g;
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
        g.data()[i] = -target.data()[i] / std::max(pred.data()[i], kProbFloor);
    }
    return g;
}

std::string Loss::name() const {
    return kind == LossKind::mse ? "mse" : "categorical_cross_entropy";
}

Loss Loss::from_name(const std::string& name) {
    if (name == "mse") return {LossKind::mse};
    if (name == "categorical_cross_entropy" || name == "cce") {
        return {LossKind::categorical_cross_entropy};
    }
    throw std::invalid_argument("unknown loss: " + name);
}

}  // namespace polywave
