// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/equivalence.hpp"

#include <algorithm>
#include <sstream>

#include "polywave/errors.hpp"

namespace polywave {

namespace {

// floor(num / den + 1/2) in exact integer arithmetic.
std::size_t round_ratio(std::size_t num, std::size_t den) { return (2 * num + den) / (2 * den); }

std::vector<std::size_t> conv_layer_indices(const NetworkSpec& spec) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        if (spec.layers[i].is_convolutional()) idx.push_back(i);
    }
    return idx;
}

}  // namespace

std::size_t equivalent_inner_width(std::size_t n_l, std::size_t n_prev, std::size_t kernel,
                                   int degree, std::size_t n_prev_equiv) {
    if (n_l < 1 || n_prev < 1 || kernel < 1 || degree < 1 || n_prev_equiv < 1) {
        throw std::invalid_argument("equivalent_inner_width: arguments must be positive");
    }
    const std::size_t num = n_l * (n_prev * kernel * static_cast<std::size_t>(degree) + 1);
    const std::size_t den = n_prev_equiv * kernel + 1;
    const std::size_t width = round_ratio(num, den);
    if (width < 1) throw TopologyError("equivalence: inner layer degenerates to width 0");
    return width;
}

std::size_t equivalent_output_width(std::size_t n_l, std::size_t n_prev, std::size_t kernel,
                                    int degree, std::size_t n_prev_equiv) {
    if (n_l < 1 || n_prev < 1 || kernel < 1 || degree < 1 || n_prev_equiv < 1) {
        throw std::invalid_argument("equivalent_output_width: arguments must be positive");
    }
    const std::size_t num = n_l * n_prev * kernel * static_cast<std::size_t>(degree);
    const std::size_t den = n_prev_equiv * kernel + n_l + 1;
    const std::size_t width = round_ratio(num, den);
    if (width < 1) throw TopologyError("equivalence: output layer degenerates to width 0");
    return width;
}

EquivalenceReport build_equivalent(const NetworkSpec& spec) {
    EquivalenceReport report;
    report.source = spec;
    report.source_params = param_count(spec);

    const std::vector<std::size_t> conv_idx = conv_layer_indices(spec);
    const bool all_degree_one = std::all_of(conv_idx.begin(), conv_idx.end(), [&](std::size_t i) {
        return spec.layers[i].effective_degree() == 1;
    });
    if (conv_idx.empty() || all_degree_one) {
        // Plain-convolution fixed point: nothing to transform, no projection.
        report.constructed = spec;
        report.constructed_params = report.source_params;
        for (std::size_t i : conv_idx) report.widths.push_back(spec.layers[i].units);
        return report;
    }

    NetworkSpec built = spec;
    std::size_t n_prev = spec.in_channels;        // source channels entering the layer
    std::size_t n_prev_equiv = spec.in_channels;  // constructed channels entering the layer
    const std::size_t last_conv = conv_idx.back();
    for (std::size_t i : conv_idx) {
        const LayerSpec& src = spec.layers[i];
        const bool is_last = (i == last_conv);
        const std::size_t width =
            is_last ? equivalent_output_width(src.units, n_prev, src.kernel,
                                              src.effective_degree(), n_prev_equiv)
                    : equivalent_inner_width(src.units, n_prev, src.kernel, src.effective_degree(),
                                             n_prev_equiv);
        LayerSpec& dst = built.layers[i];
        dst.kind = LayerKind::conv;
        dst.units = width;
        dst.degree = 1;
        report.widths.push_back(width);
        n_prev = src.units;
        n_prev_equiv = width;
    }

    // The projection that restores the source channel count goes after the
    // pooling run that follows the last convolution layer.
    std::size_t insert_at = last_conv + 1;
    while (insert_at < built.layers.size() &&
           (built.layers[insert_at].kind == LayerKind::maxpool2 ||
            built.layers[insert_at].kind == LayerKind::upsample2)) {
        ++insert_at;
    }
    LayerSpec projection;
    projection.kind = LayerKind::conv;
    projection.units = spec.layers[last_conv].units;
    projection.kernel = 1;
    projection.degree = 1;
    projection.act = spec.layers[last_conv].act;
    built.layers.insert(built.layers.begin() + static_cast<std::ptrdiff_t>(insert_at), projection);
    report.added_projection = true;

    shape_trace(built);  // constructed spec must compose
    report.constructed = built;
    report.constructed_params = param_count(built);
    report.abs_diff = report.constructed_params > report.source_params
                          ? report.constructed_params - report.source_params
                          : report.source_params - report.constructed_params;
    return report;
}

std::string report_text(const EquivalenceReport& report) {
    std::ostringstream out;
    out << "source_params " << report.source_params << "\n";
    out << "constructed_params " << report.constructed_params << "\n";
    out << "abs_diff " << report.abs_diff << "\n";
    out << "added_projection " << (report.added_projection ? 1 : 0) << "\n";
    for (std::size_t w : report.widths) out << "width " << w << "\n";
    return out.str();
}

GrowResult grow_to_performance(const EquivalenceReport& base, double target_metric,
                               const std::function<double(const NetworkSpec&)>& eval_fn,
                               std::size_t budget) {
    GrowResult result;
    result.spec = base.constructed;
    result.metric = eval_fn(result.spec);
    if (result.metric >= target_metric) {
        result.met_target = true;
        return result;
    }

    const std::vector<std::size_t> conv_idx = conv_layer_indices(result.spec);
    if (conv_idx.empty()) return result;

    NetworkSpec best_spec = result.spec;
    double best_metric = result.metric;
    std::size_t cursor = 0;
    for (std::size_t step = 0; step < budget; ++step) {
        result.spec.layers[conv_idx[cursor]].units += 1;
        cursor = (cursor + 1) % conv_idx.size();
        result.increments += 1;
        result.metric = eval_fn(result.spec);
        if (result.metric > best_metric) {
            best_metric = result.metric;
            best_spec = result.spec;
        }
        if (result.metric >= target_metric) {
            result.met_target = true;
            return result;
        }
    }
    result.spec = best_spec;  // budget exhausted: report best-found, flagged
    result.metric = best_metric;
    result.met_target = false;
    return result;
}

}  // namespace polywave
