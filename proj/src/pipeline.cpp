// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/pipeline.hpp"

#include <stdexcept>

#include "polywave/errors.hpp"

namespace polywave {

bool wants_unit_range(const NetworkSpec& spec) {
    for (const LayerSpec& l : spec.layers) {
        if (l.is_convolutional() && (l.act == Act::relu || l.act == Act::swish)) return true;
    }
    return false;
}

Vec to_unit_range(const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * (x[i] + 1.0);
    return out;
}

std::vector<Sample> classification_windows(const LabeledSignals& data, const WindowSpec& window,
                                           std::size_t class_count, bool unit_range) {
    if (data.signals.size() != data.labels.size()) {
        throw DimensionError("classification_windows: label count mismatch");
    }
    std::vector<Sample> samples;
    for (std::size_t s = 0; s < data.signals.size(); ++s) {
        const int label = data.labels[s];
        if (label < 0 || static_cast<std::size_t>(label) >= class_count) {
            throw std::invalid_argument("classification_windows: label out of range");
        }
        const Vec source = unit_range ? to_unit_range(data.signals[s]) : data.signals[s];
        const SlideResult slid = slide(source, window);
        for (const Vec& win : slid.windows) {
            Sample sample;
            sample.input = Mat::from_row(win);
            sample.target = Mat(1, class_count, 0.0);
            sample.target(0, static_cast<std::size_t>(label)) = 1.0;
            sample.label = label;
            sample.signal_id = static_cast<int>(s);
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

std::vector<Sample> denoise_windows(const DenoisePairs& pairs, const WindowSpec& window,
                                    bool unit_range) {
    if (pairs.clean.size() != pairs.noisy.size()) {
        throw DimensionError("denoise_windows: pair count mismatch");
    }
    std::vector<Sample> samples;
    for (std::size_t p = 0; p < pairs.clean.size(); ++p) {
        if (pairs.clean[p].size() != pairs.noisy[p].size()) {
            throw DimensionError("denoise_windows: clean/noisy length mismatch");
        }
        const Vec clean = unit_range ? to_unit_range(pairs.clean[p]) : pairs.clean[p];
        const Vec noisy = unit_range ? to_unit_range(pairs.noisy[p]) : pairs.noisy[p];
        const SlideResult noisy_win = slide(noisy, window);
        const SlideResult clean_win = slide(clean, window);
        for (std::size_t k = 0; k < noisy_win.windows.size(); ++k) {
            Sample sample;
            sample.input = Mat::from_row(noisy_win.windows[k]);
            sample.target = Mat::from_row(clean_win.windows[k]);
            sample.signal_id = static_cast<int>(p);
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

std::function<Vec(const Vec&)> window_model(const Network& net) {
    if (net.spec().in_channels != 1 || net.out_shape().channels != 1 ||
        net.out_shape().samples != net.spec().in_samples) {
        throw TopologyError("window_model: network must map one channel onto itself");
    }
    return [&net](const Vec& window) {
        return net.forward(Mat::from_row(window)).row_vec(0);
    };
}

}  // namespace polywave
