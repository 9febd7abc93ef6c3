// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "polywave/audio.hpp"
#include "polywave/errors.hpp"
#include "polywave/rng.hpp"
#include "polywave/threading.hpp"

namespace polywave {

namespace {

bool net_ends_with_softmax(const Network& net) {
    if (net.layer_count() == 0) return false;
    const Activation* act = net.layer(net.layer_count() - 1).activation();
    return act && act->is_softmax();
}

/// Gradient of the loss with respect to the last layer's output, or with
/// respect to its pre-activation when softmax fuses with cross-entropy.
Mat seed_gradient(const Network& net, const Loss& loss, const Mat& target, const Mat& pred) {
    if (net_ends_with_softmax(net)) {
        if (loss.kind != LossKind::categorical_cross_entropy) {
            throw TopologyError("softmax output requires the cross-entropy loss");
        }
        Mat g(pred.rows(), pred.cols());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            g.data()[i] = pred.data()[i] - target.data()[i];
        }
        return g;
    }
    return loss.grad(target, pred);
}

void backward_sample(const Network& net, const Sample& sample,
                     const std::vector<LayerCache>& caches, const Loss& loss,
                     GradientBundle& grads) {
    const Mat& pred = caches.back().output;
    Mat g = seed_gradient(net, loss, sample.target, pred);
    for (std::size_t l = net.layer_count(); l-- > 0;) {
        g = net.layer(l).backward(g, caches[l], grads[l]);
    }
}

int argmax_row(const Mat& m) {
    const double* p = m.row(0);
    int best = 0;
    for (std::size_t i = 1; i < m.cols(); ++i) {
        if (p[i] > p[best]) best = static_cast<int>(i);
    }
    return best;
}

}  // namespace

std::vector<std::vector<LayerCache>> forward_batch(const Network& net,
                                                   std::span<const Sample> batch, int threads) {
    std::vector<std::vector<LayerCache>> caches(batch.size());
    parallel_for(batch.size(), threads,
                 [&](std::size_t i) { net.forward(batch[i].input, caches[i]); });
    return caches;
}

GradientBundle backward_sweep(const Network& net, std::span<const Sample> batch,
                              const std::vector<std::vector<LayerCache>>& caches,
                              const Loss& loss) {
    if (batch.empty()) throw DimensionError("backward_sweep: empty batch");
    if (caches.size() != batch.size()) {
        throw DimensionError("backward_sweep: forward caches missing for this batch");
    }
    for (const auto& c : caches) {
        if (c.size() != net.layer_count()) {
            throw DimensionError("backward_sweep: forward caches missing for this batch");
        }
    }
    GradientBundle acc = zero_bundle(net);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        backward_sample(net, batch[i], caches[i], loss, acc);
    }
    bundle_scale(acc, 1.0 / static_cast<double>(batch.size()));
    return acc;
}

double grad_check(Network& net, const Sample& sample, const Loss& loss, double h) {
    std::vector<LayerCache> caches;
    const Mat pred = net.forward(sample.input, caches);
    const double base_loss = loss.eval(sample.target, pred);
    if (!std::isfinite(base_loss)) throw NumericError("grad_check: non-finite loss");

    GradientBundle analytic = zero_bundle(net);
    backward_sample(net, sample, caches, loss, analytic);

    double worst = 0.0;
    auto eval_at = [&] { return loss.eval(sample.target, net.forward(sample.input)); };
    auto check_span = [&](std::span<double> theta, const Vec& g) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            theta[i] = saved + h;
            const double up = eval_at();
            theta[i] = saved - h;
            const double down = eval_at();
            theta[i] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("grad_check: non-finite loss");
            }
            const double fd = (up - down) / (2.0 * h);
            const double denom = std::max({std::fabs(g[i]), std::fabs(fd), 1e-12});
            worst = std::max(worst, std::fabs(g[i] - fd) / denom);
        }
    };
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        check_span(net.layer(l).weights(), analytic[l].weights);
        check_span(net.layer(l).biases(), analytic[l].biases);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Cross-validation

FoldPlan make_fold_plan(std::size_t n_items, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold plan: k must be at least 2");
    if (n_items < k) throw std::invalid_argument("fold plan: fewer items than folds");
    std::vector<std::size_t> order(n_items);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    FoldPlan plan{k, seed, std::vector<std::vector<std::size_t>>(k)};
    const std::size_t base = n_items / k;
    const std::size_t extra = n_items % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t take = base + (f < extra ? 1 : 0);
        plan.folds[f].assign(order.begin() + pos, order.begin() + pos + take);
        pos += take;
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalResult evaluate(const Network& net, std::span<const Sample> samples, const Loss& loss,
                    int threads) {
    EvalResult result;
    if (samples.empty()) return result;
    result.classification = net_ends_with_softmax(net);

    std::vector<double> losses(samples.size());
    std::vector<int> predicted(samples.size());
    std::vector<double> snrs(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        const Mat pred = net.forward(samples[i].input);
        losses[i] = loss.eval(samples[i].target, pred);
        if (result.classification) {
            predicted[i] = argmax_row(pred);
        } else {
            snrs[i] = snr_db(samples[i].target.row_vec(0), pred.row_vec(0));
        }
    });

    double loss_acc = 0.0;
    for (double v : losses) loss_acc += v;
    result.loss = loss_acc / static_cast<double>(samples.size());

    if (result.classification) {
        std::size_t hits = 0;
        std::map<int, std::vector<int>> by_signal;
        std::map<int, int> signal_label;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (predicted[i] == samples[i].label) ++hits;
            by_signal[samples[i].signal_id].push_back(predicted[i]);
            signal_label[samples[i].signal_id] = samples[i].label;
        }
        result.window_accuracy = static_cast<double>(hits) / static_cast<double>(samples.size());
        std::size_t signal_hits = 0;
        for (const auto& [id, votes] : by_signal) {
            if (mode_label(votes) == signal_label[id]) ++signal_hits;
        }
        result.signal_accuracy =
            by_signal.empty() ? 0.0
                              : static_cast<double>(signal_hits) / static_cast<double>(by_signal.size());
    } else {
        double snr_acc = 0.0;
        for (double v : snrs) snr_acc += v;
        result.snr_db = snr_acc / static_cast<double>(samples.size());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Training

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::ostringstream out;
    out << "epoch,fold,split,metric,value\n";
    out.precision(17);
    for (const TraceRow& r : rows) {
        out << r.epoch << "," << r.fold << "," << r.split << "," << r.metric << "," << r.value
            << "\n";
    }
    return out.str();
}

static void push_eval_rows(std::vector<TraceRow>* traces, long epoch, long fold,
                           const std::string& split, const EvalResult& r) {
    if (!traces) return;
    traces->push_back({epoch, fold, split, "loss", r.loss});
    if (r.classification) {
        traces->push_back({epoch, fold, split, "window_accuracy", r.window_accuracy});
        traces->push_back({epoch, fold, split, "signal_accuracy", r.signal_accuracy});
    } else {
        traces->push_back({epoch, fold, split, "snr_db", r.snr_db});
    }
}

EvalResult train_network(Network& net, std::span<const Sample> train, std::span<const Sample> eval,
                         const Loss& loss, const TrainOptions& opts, std::vector<TraceRow>* traces,
                         long fold_id) {
    if (train.empty()) throw std::invalid_argument("train_network: empty training set");
    Rng shuffle_rng(mix_seed(opts.seed, 17));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    SgdState sgd{opts.lr};
    AdamState adam;
    adam.lr = opts.lr;

    EvalResult last_eval;
    std::vector<Sample> batch;
    for (long epoch = 1; epoch <= opts.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t pos = 0; pos < order.size(); pos += opts.batch) {
            const std::size_t take = std::min(opts.batch, order.size() - pos);
            batch.clear();
            for (std::size_t i = 0; i < take; ++i) batch.push_back(train[order[pos + i]]);

            const auto caches = forward_batch(net, batch, opts.threads);
            double batch_loss = 0.0;
            for (std::size_t i = 0; i < take; ++i) {
                batch_loss += loss.eval(batch[i].target, caches[i].back().output);
            }
            batch_loss /= static_cast<double>(take);
            if (!std::isfinite(batch_loss)) {
                throw NumericError("training: non-finite loss at epoch " + std::to_string(epoch));
            }
            epoch_loss += batch_loss * static_cast<double>(take);
            seen += take;

            GradientBundle grads = backward_sweep(net, batch, caches, loss);
            if (!bundle_all_finite(grads)) {
                throw NumericError("training: non-finite gradient at epoch " +
                                   std::to_string(epoch));
            }
            if (opts.clip_norm > 0.0) {
                const double norm = std::sqrt(bundle_sq_norm(grads));
                if (norm > opts.clip_norm) bundle_scale(grads, opts.clip_norm / norm);
            }
            if (opts.use_adam) {
                adam_step(net, grads, adam);
            } else {
                sgd_step(net, grads, sgd);
            }
        }
        if (traces) {
            traces->push_back({epoch, fold_id, "train", "loss",
                               epoch_loss / static_cast<double>(seen)});
        }
        last_eval = evaluate(net, eval.empty() ? train : eval, loss, opts.threads);
        push_eval_rows(traces, epoch, fold_id, eval.empty() ? "train_eval" : "val", last_eval);
        if (opts.stop_at_accuracy > 0.0 && last_eval.classification &&
            last_eval.window_accuracy >= opts.stop_at_accuracy) {
            break;
        }
    }
    return last_eval;
}

KfoldResult kfold_train(const NetworkSpec& spec, std::span<const Sample> dataset,
                        const FoldPlan& plan, const Loss& loss, const TrainOptions& opts) {
    KfoldResult result;
    for (const auto& fold : plan.folds) {
        if (fold.empty()) throw std::invalid_argument("kfold_train: empty fold");
    }
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        std::vector<Sample> train_set;
        std::vector<Sample> val_set;
        for (std::size_t g = 0; g < plan.folds.size(); ++g) {
            for (std::size_t idx : plan.folds[g]) {
                (g == f ? val_set : train_set).push_back(dataset[idx]);
            }
        }
        Network net(spec);
        net.init_params(mix_seed(plan.seed, f + 1));
        TrainOptions fold_opts = opts;
        fold_opts.seed = mix_seed(opts.seed, f + 101);
        const EvalResult final_eval = train_network(net, train_set, val_set, loss, fold_opts,
                                                    &result.traces, static_cast<long>(f));
        const double metric = final_eval.classification ? final_eval.window_accuracy
                              : loss.kind == LossKind::mse ? final_eval.snr_db
                                                           : final_eval.loss;
        result.summary.fold_values.push_back(metric);
    }
    const auto& vals = result.summary.fold_values;
    result.summary.min_value = *std::min_element(vals.begin(), vals.end());
    result.summary.max_value = *std::max_element(vals.begin(), vals.end());
    result.summary.mean_value =
        std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    return result;
}

}  // namespace polywave
