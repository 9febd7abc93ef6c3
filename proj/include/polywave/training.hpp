// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polywave/loss.hpp"
#include "polywave/network.hpp"
#include "polywave/optimizer.hpp"

namespace polywave {

/// One training example. Classification samples carry a one-hot target plus
/// the class label and the id of the signal the window was cut from;
/// regression samples carry the clean window as target.
struct Sample {
    Mat input;
    Mat target;
    int label = -1;
    int signal_id = -1;
};

/// Forward passes for a batch, keeping per-layer caches for the sweep.
std::vector<std::vector<LayerCache>> forward_batch(const Network& net,
                                                   std::span<const Sample> batch, int threads = 1);

/// Full backpropagation sweep over a batch: seeds the loss gradient at the
/// last layer (fused to y_hat - y when it is softmax with cross-entropy) and
/// walks the layers backwards. Gradients are averaged over the batch.
/// Throws DimensionError when the caches do not match the batch.
GradientBundle backward_sweep(const Network& net, std::span<const Sample> batch,
                              const std::vector<std::vector<LayerCache>>& caches, const Loss& loss);

/// Central finite-difference check of every parameter gradient on one sample.
/// Returns the worst relative error |g - g_fd| / max(|g|, |g_fd|, 1e-12).
/// The network is perturbed in place and restored bit-exactly.
double grad_check(Network& net, const Sample& sample, const Loss& loss, double h = 1e-6);

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldPlan {
    std::size_t k = 10;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> folds;  // disjoint, union = all indices
};

FoldPlan make_fold_plan(std::size_t n_items, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Training loop

struct TrainOptions {
    double lr = 1e-3;
    long epochs = 10;
    std::size_t batch = 32;
    std::uint64_t seed = 0;
    double clip_norm = 0.0;  // 0 disables global-norm gradient clipping
    int threads = 1;
    bool use_adam = true;
    double stop_at_accuracy = -1.0;  // early stop once eval accuracy reaches this
};

struct TraceRow {
    long epoch = 0;
    long fold = 0;
    std::string split;
    std::string metric;
    double value = 0.0;
};

std::string trace_csv(const std::vector<TraceRow>& rows);

struct EvalResult {
    double loss = 0.0;
    double window_accuracy = 0.0;  // classification only
    double signal_accuracy = 0.0;  // classification only (mode over windows)
    double snr_db = 0.0;           // regression only (mean per-window SNR)
    bool classification = false;
};

EvalResult evaluate(const Network& net, std::span<const Sample> samples, const Loss& loss,
                    int threads = 1);

/// Trains in place for opts.epochs, shuffling each epoch, evaluating the eval
/// split after every epoch and appending trace rows under the given fold id.
/// Throws NumericError when the loss stops being finite.
EvalResult train_network(Network& net, std::span<const Sample> train, std::span<const Sample> eval,
                         const Loss& loss, const TrainOptions& opts, std::vector<TraceRow>* traces,
                         long fold_id = 0);

struct FoldSummary {
    double min_value = 0.0;
    double max_value = 0.0;
    double mean_value = 0.0;
    std::vector<double> fold_values;  // final validation metric per fold
};

struct KfoldResult {
    std::vector<TraceRow> traces;
    FoldSummary summary;
};

/// Trains one fresh network per fold (train on k-1 folds, validate on the
/// held-out one) and reports the min/max/mean of the final validation metric
/// (accuracy for classification, SNR in dB otherwise, loss as fallback).
KfoldResult kfold_train(const NetworkSpec& spec, std::span<const Sample> dataset,
                        const FoldPlan& plan, const Loss& loss, const TrainOptions& opts);

}  // namespace polywave
