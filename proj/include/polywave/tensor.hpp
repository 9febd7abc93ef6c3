// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace polywave {

using Vec = std::vector<double>;

/// Dense channels-by-samples matrix of 64-bit reals, row-major.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, value) {}

    static Mat from_rows(const std::vector<Vec>& rows);
    static Mat from_row(const Vec& row);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    double* row(std::size_t r) { return values_.data() + r * cols_; }
    const double* row(std::size_t r) const { return values_.data() + r * cols_; }
    std::span<double> row_span(std::size_t r) { return {row(r), cols_}; }
    std::span<const double> row_span(std::size_t r) const { return {row(r), cols_}; }
    Vec row_vec(std::size_t r) const { return Vec(row(r), row(r) + cols_); }

    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }
    const Vec& values() const noexcept { return values_; }
    Vec& values() noexcept { return values_; }

    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec values_;
};

/// Sliding dot product without kernel flip: out(m) = sum_k kernel(k) * x(m+k),
/// length |x| - |kernel| + 1. Throws DimensionError when the kernel is longer
/// than the signal.
Vec valid_corr(const Vec& x, const Vec& kernel);

/// Accumulating form of valid_corr; out must hold m - k + 1 entries.
void valid_corr_acc(const double* x, std::size_t m, const double* kernel, std::size_t k,
                    double* out);

/// Adjoint of valid_corr: equals valid_corr of g zero-padded with |kernel|-1
/// zeros on each side against the reversed kernel. Length |g| + |kernel| - 1.
Vec full_corr_flipped(const Vec& g, const Vec& kernel);

/// Accumulating form of full_corr_flipped; out must hold m + k - 1 entries.
void full_corr_flipped_acc(const double* g, std::size_t m, const double* kernel, std::size_t k,
                           double* out);

/// Elementwise d-th power; degrees start at 1.
Mat hadamard_pow(const Mat& y, int degree);

Mat add(const Mat& a, const Mat& b);
Mat hadamard(const Mat& a, const Mat& b);
Mat scale(const Mat& a, double s);

/// Sum of each row.
Vec row_sum(const Mat& a);

/// Max over non-overlapping sample pairs with the winning source index per
/// pair (first occurrence on ties). Output length floor(|x| / 2).
std::pair<Vec, std::vector<std::size_t>> max_pairs(const Vec& x);

/// Repeats every sample twice; output length 2|x|.
Vec repeat_each(const Vec& x);

double dot(const Vec& a, const Vec& b);

}  // namespace polywave
