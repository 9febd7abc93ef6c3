// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "polywave/audio.hpp"
#include "polywave/datagen.hpp"
#include "polywave/network.hpp"
#include "polywave/training.hpp"

namespace polywave {

/// True when any convolutional layer uses an activation that nullifies
/// negatives (relu/swish); such pipelines map signals into [0, 1] first.
bool wants_unit_range(const NetworkSpec& spec);

Vec to_unit_range(const Vec& x);

/// Slides every signal into weighted windows; each sample carries the window
/// as a 1 x w input, a 1 x class_count one-hot target, the class label and
/// the source signal id.
std::vector<Sample> classification_windows(const LabeledSignals& data, const WindowSpec& window,
                                           std::size_t class_count, bool unit_range);

/// Pairs the weighted noisy window with the weighted clean window.
std::vector<Sample> denoise_windows(const DenoisePairs& pairs, const WindowSpec& window,
                                    bool unit_range);

/// Wraps a single-channel network as a window-to-window model for the
/// end-to-end denoiser.
std::function<Vec(const Vec&)> window_model(const Network& net);

}  // namespace polywave
