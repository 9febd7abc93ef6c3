// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "polywave/tensor.hpp"

namespace polywave {

enum class WindowFn { hamming, rectangular };

struct WindowSpec {
    std::size_t length = 1600;
    double overlap = 0.5;  // in [0, 1)
    WindowFn fn = WindowFn::hamming;
};

/// Symmetric Hamming window h(n) = 0.54 - 0.46 cos(2 pi n / (w-1)); needs
/// w >= 2 so the endpoints evaluate to 0.08.
Vec hamming_window(std::size_t w);

/// Window weights for a spec (all ones for rectangular).
Vec window_weights(const WindowSpec& spec);

struct SlideResult {
    std::vector<Vec> windows;         // weighted excerpts, each of spec.length
    std::vector<std::size_t> starts;  // start index per window
};

/// Number of windows the sliding definition yields for an n-sample signal:
/// floor((n - w) / ((1 - overlap) w)) + 1, one zero-padded window when n < w.
std::size_t slide_count(std::size_t n, const WindowSpec& spec);

/// Cuts the signal into weighted windows at starts floor(k (1-overlap) w).
/// Signals shorter than the window are zero-padded on the right.
SlideResult slide(const Vec& x, const WindowSpec& spec);

/// Most frequent label; ties go to the smallest id. Throws on empty input.
int mode_label(std::span<const int> labels);

/// Adds white Gaussian noise scaled so the measured signal-to-noise ratio
/// hits the target exactly (the noise is normalized to its empirical power).
/// Throws on zero-power signals.
Vec add_awgn(const Vec& x, double target_snr_db, std::uint64_t seed);

/// Global SNR in dB; degenerate powers clamp to the segmental limits
/// (35 dB for zero noise, -10 dB for zero signal power).
double snr_db(const Vec& clean, const Vec& noisy);

/// Mean squared error, normalized by the sample count.
double mse(const Vec& clean, const Vec& estimate);

/// Segmental SNR: mean of per-block SNR over contiguous seg_len blocks,
/// each clamped to [-10, 35] dB; blocks with zero signal power are skipped.
double snrseg_db(const Vec& clean, const Vec& estimate, std::size_t seg_len = 160);

/// Task-dependent metric bundle; fill the fields that apply.
struct MetricReport {
    double mse = 0.0;
    double snr_db = 0.0;
    double snrseg_db = 0.0;
    double window_accuracy = 0.0;
    double signal_accuracy = 0.0;
};

/// Runs a window-sized model over a whole signal: slide, infer per window,
/// divide each output by the window weights, and average overlapping samples
/// (weighted by the squared window so edge estimates do not dominate).
/// Samples past the last sliding window are taken from an extra end-aligned
/// window. The output has the input's length.
Vec denoise_end_to_end(const std::function<Vec(const Vec&)>& model, const Vec& x,
                       const WindowSpec& spec);

}  // namespace polywave
