// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/audio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "polywave/errors.hpp"
#include "polywave/rng.hpp"

namespace polywave {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSegFloorDb = -10.0;
constexpr double kSegCeilDb = 35.0;

double mean_square(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc / static_cast<double>(v.size());
}
}  // namespace

Vec hamming_window(std::size_t w) {
    if (w < 2) throw std::invalid_argument("hamming_window: needs at least 2 samples");
    Vec h(w);
    for (std::size_t n = 0; n < w; ++n) {
        h[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                      static_cast<double>(w - 1));
    }
    return h;
}

Vec window_weights(const WindowSpec& spec) {
    if (spec.fn == WindowFn::hamming) return hamming_window(spec.length);
    return Vec(spec.length, 1.0);
}

static double stride_of(const WindowSpec& spec) {
    if (spec.length < 1 || spec.overlap < 0.0 || spec.overlap >= 1.0) {
        throw std::invalid_argument("window spec: need length >= 1 and overlap in [0, 1)");
    }
    return (1.0 - spec.overlap) * static_cast<double>(spec.length);
}

std::size_t slide_count(std::size_t n, const WindowSpec& spec) {
    const double stride = stride_of(spec);
    if (n <= spec.length) return 1;
    return static_cast<std::size_t>(
               std::floor(static_cast<double>(n - spec.length) / stride)) +
           1;
}

SlideResult slide(const Vec& x, const WindowSpec& spec) {
    const double stride = stride_of(spec);
    const std::size_t w = spec.length;
    const Vec h = window_weights(spec);

    Vec padded;
    const Vec* src = &x;
    if (x.size() < w) {
        padded = x;
        padded.resize(w, 0.0);
        src = &padded;
    }
    const std::size_t count = slide_count(src->size(), spec);

    SlideResult result;
    result.windows.reserve(count);
    result.starts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t start =
            static_cast<std::size_t>(std::floor(static_cast<double>(k) * stride));
        Vec win(w);
        for (std::size_t i = 0; i < w; ++i) win[i] = h[i] * (*src)[start + i];
        result.windows.push_back(std::move(win));
        result.starts.push_back(start);
    }
    return result;
}

int mode_label(std::span<const int> labels) {
    if (labels.empty()) throw std::invalid_argument("mode_label: empty label list");
    std::map<int, std::size_t> counts;
    for (int l : labels) ++counts[l];
    int best = labels[0];
    std::size_t best_count = 0;
    for (const auto& [label, count] : counts) {  // map order makes ties pick the smallest id
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

Vec add_awgn(const Vec& x, double target_snr_db, std::uint64_t seed) {
    const double signal_power = mean_square(x);
    if (signal_power <= 0.0) throw std::invalid_argument("add_awgn: zero-power signal");
    Rng rng(seed);
    Vec noise(x.size());
    for (double& v : noise) v = rng.normal();
    const double raw_power = mean_square(noise);
    if (raw_power <= 0.0) throw NumericError("add_awgn: degenerate noise draw");
    // Normalize the draw to its empirical power so the measured ratio equals
    // the target for any signal length.
    const double wanted_power = signal_power / std::pow(10.0, target_snr_db / 10.0);
    const double gain = std::sqrt(wanted_power / raw_power);
    Vec out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += gain * noise[i];
    return out;
}

double snr_db(const Vec& clean, const Vec& noisy) {
    if (clean.size() != noisy.size()) throw DimensionError("snr: length mismatch");
    double ps = 0.0;
    double pn = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        ps += clean[i] * clean[i];
        const double n = noisy[i] - clean[i];
        pn += n * n;
    }
    if (pn <= 0.0) return kSegCeilDb;
    if (ps <= 0.0) return kSegFloorDb;
    return 10.0 * std::log10(ps / pn);
}

double mse(const Vec& clean, const Vec& estimate) {
    if (clean.size() != estimate.size()) throw DimensionError("mse: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const double d = estimate[i] - clean[i];
        acc += d * d;
    }
    return acc / static_cast<double>(clean.size());
}

double snrseg_db(const Vec& clean, const Vec& estimate, std::size_t seg_len) {
    if (clean.size() != estimate.size()) throw DimensionError("snrseg: length mismatch");
    if (seg_len < 1) throw std::invalid_argument("snrseg: segment length must be positive");
    double acc = 0.0;
    std::size_t blocks = 0;
    for (std::size_t pos = 0; pos < clean.size(); pos += seg_len) {
        const std::size_t end = std::min(clean.size(), pos + seg_len);
        double ps = 0.0;
        double pn = 0.0;
        for (std::size_t i = pos; i < end; ++i) {
            ps += clean[i] * clean[i];
            const double n = estimate[i] - clean[i];
            pn += n * n;
        }
        if (ps <= 0.0) continue;  // silent block
        const double block_db =
            pn <= 0.0 ? kSegCeilDb : 10.0 * std::log10(ps / pn);
        acc += std::clamp(block_db, kSegFloorDb, kSegCeilDb);
        ++blocks;
    }
    if (blocks == 0) return kSegFloorDb;
    return acc / static_cast<double>(blocks);
}

Vec denoise_end_to_end(const std::function<Vec(const Vec&)>& model, const Vec& x,
                       const WindowSpec& spec) {
    const std::size_t w = spec.length;
    const Vec h = window_weights(spec);
    const SlideResult slid = slide(x, spec);

    // Divided estimates are averaged with weights h^2: a uniform mean would
    // amplify window-edge model error by 1/h after the division, while the
    // weighted mean stays unbiased and keeps the identity round trip exact.
    const std::size_t out_len = std::max(x.size(), w);
    Vec sum(out_len, 0.0);
    Vec weight(out_len, 0.0);

    auto apply_window = [&](const Vec& win, std::size_t start) {
        Vec cleaned = model(win);
        if (cleaned.size() != w) {
            throw DimensionError("denoise_end_to_end: model output length mismatch");
        }
        for (std::size_t i = 0; i < w; ++i) {
            sum[start + i] += (cleaned[i] / h[i]) * (h[i] * h[i]);
            weight[start + i] += h[i] * h[i];
        }
    };
    for (std::size_t k = 0; k < slid.windows.size(); ++k) {
        apply_window(slid.windows[k], slid.starts[k]);
    }

    // Cover any tail the sliding grid missed with one end-aligned window.
    const std::size_t covered_end = slid.starts.back() + w;
    if (covered_end < x.size()) {
        const std::size_t start = x.size() - w;
        Vec win(w);
        for (std::size_t i = 0; i < w; ++i) win[i] = h[i] * x[start + i];
        Vec cleaned = model(win);
        if (cleaned.size() != w) {
            throw DimensionError("denoise_end_to_end: model output length mismatch");
        }
        for (std::size_t i = covered_end; i < x.size(); ++i) {
            const std::size_t j = i - start;
            sum[i] = (cleaned[j] / h[j]) * (h[j] * h[j]);
            weight[i] = h[j] * h[j];
        }
    }

    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = sum[i] / weight[i];
    return y;
}

}  // namespace polywave
