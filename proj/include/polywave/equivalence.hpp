// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polywave/network.hpp"

namespace polywave {

/// Outcome of constructing the parameter-matched plain-convolution network.
struct EquivalenceReport {
    NetworkSpec source;
    NetworkSpec constructed;
    std::vector<std::size_t> widths;  // N'_l per transformed convolution layer
    std::size_t source_params = 0;
    std::size_t constructed_params = 0;
    std::size_t abs_diff = 0;
    bool added_projection = false;  // trailing width-1 layer appended
};

/// Width of an inner equivalent layer:
/// floor(N_l (N_{l-1} K D + 1) / (N'_{l-1} K + 1) + 1/2).
/// Throws TopologyError when the result degenerates below 1.
std::size_t equivalent_inner_width(std::size_t n_l, std::size_t n_prev, std::size_t kernel,
                                   int degree, std::size_t n_prev_equiv);

/// Width of the last equivalent layer, which shares its parameter budget with
/// an appended width-1 projection restoring the source channel count:
/// floor(N_L N_{L-1} K D / (N'_{L-1} K + N_L + 1) + 1/2).
std::size_t equivalent_output_width(std::size_t n_l, std::size_t n_prev, std::size_t kernel,
                                    int degree, std::size_t n_prev_equiv);

/// Builds the parameter-matched network: inner polynomial layers get the
/// inner width, the last one gets the output width plus the width-1
/// projection, pooling/flatten/dense pass through. Specs whose degrees are
/// all 1 are already plain convolutions and come back unchanged.
EquivalenceReport build_equivalent(const NetworkSpec& spec);

std::string report_text(const EquivalenceReport& report);

struct GrowResult {
    NetworkSpec spec;
    double metric = 0.0;
    bool met_target = false;
    std::size_t increments = 0;
};

/// Grows the constructed network one neuron at a time, round-robin over its
/// convolution layers starting from the first, re-evaluating after every
/// increment until eval_fn meets the target or the increment budget runs out
/// (best-found comes back flagged).
GrowResult grow_to_performance(const EquivalenceReport& base, double target_metric,
                               const std::function<double(const NetworkSpec&)>& eval_fn,
                               std::size_t budget);

}  // namespace polywave
