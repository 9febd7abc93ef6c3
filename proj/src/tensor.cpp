// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polywave/errors.hpp"

namespace polywave {

Mat Mat::from_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) return {};
    Mat m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw DimensionError("from_rows: ragged rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r));
    }
    return m;
}

Mat Mat::from_row(const Vec& row) {
    Mat m(1, row.size());
    std::copy(row.begin(), row.end(), m.row(0));
    return m;
}

bool Mat::all_finite() const noexcept {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void valid_corr_acc(const double* x, std::size_t m, const double* kernel, std::size_t k,
                    double* out) {
    const std::size_t out_len = m - k + 1;
    for (std::size_t i = 0; i < out_len; ++i) {
        double acc = 0.0;
        const double* xi = x + i;
        for (std::size_t t = 0; t < k; ++t) acc += kernel[t] * xi[t];
        out[i] += acc;
    }
}

Vec valid_corr(const Vec& x, const Vec& kernel) {
    if (kernel.empty() || x.empty()) throw DimensionError("valid_corr: empty operand");
    if (kernel.size() > x.size()) throw DimensionError("valid_corr: kernel longer than signal");
    Vec out(x.size() - kernel.size() + 1, 0.0);
    valid_corr_acc(x.data(), x.size(), kernel.data(), kernel.size(), out.data());
    return out;
}

void full_corr_flipped_acc(const double* g, std::size_t m, const double* kernel, std::size_t k,
                           double* out) {
    // out(i) = sum_{t} kernel(t) * g(i - t) over the in-range taps, which is
    // the padded-and-reversed valid_corr written without materializing pads.
    const std::size_t out_len = m + k - 1;
    for (std::size_t i = 0; i < out_len; ++i) {
        const std::size_t t_lo = (i >= m) ? i - m + 1 : 0;
        const std::size_t t_hi = std::min(i, k - 1);
        double acc = 0.0;
        for (std::size_t t = t_lo; t <= t_hi; ++t) acc += kernel[t] * g[i - t];
        out[i] += acc;
    }
}

Vec full_corr_flipped(const Vec& g, const Vec& kernel) {
    if (kernel.empty() || g.empty()) throw DimensionError("full_corr_flipped: empty operand");
    Vec out(g.size() + kernel.size() - 1, 0.0);
    full_corr_flipped_acc(g.data(), g.size(), kernel.data(), kernel.size(), out.data());
    return out;
}

Mat hadamard_pow(const Mat& y, int degree) {
    if (degree < 1) throw std::invalid_argument("hadamard_pow: degree must be >= 1");
    Mat out = y;
    for (double& v : out.values()) {
        double p = v;
        for (int d = 1; d < degree; ++d) p *= v;
        v = p;
    }
    return out;
}

static void check_same_shape(const Mat& a, const Mat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError(what);
}

Mat add(const Mat& a, const Mat& b) {
    check_same_shape(a, b, "add: shape mismatch");
    Mat out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Mat hadamard(const Mat& a, const Mat& b) {
    check_same_shape(a, b, "hadamard: shape mismatch");
    Mat out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

Mat scale(const Mat& a, double s) {
    Mat out = a;
    for (double& v : out.values()) v *= s;
    return out;
}

Vec row_sum(const Mat& a) {
    Vec out(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double acc = 0.0;
        const double* p = a.row(r);
        for (std::size_t c = 0; c < a.cols(); ++c) acc += p[c];
        out[r] = acc;
    }
    return out;
}

std::pair<Vec, std::vector<std::size_t>> max_pairs(const Vec& x) {
    const std::size_t n = x.size() / 2;
    Vec out(n);
    std::vector<std::size_t> arg(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = 2 * i;
        if (x[a + 1] > x[a]) {
            out[i] = x[a + 1];
            arg[i] = a + 1;
        } else {
            out[i] = x[a];
            arg[i] = a;
        }
    }
    return {std::move(out), std::move(arg)};
}

Vec repeat_each(const Vec& x) {
    Vec out(2 * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[2 * i] = x[i];
        out[2 * i + 1] = x[i];
    }
    return out;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace polywave
