// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/layer.hpp"

#include <algorithm>
#include <cmath>

#include "polywave/errors.hpp"

namespace polywave {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// ---------------------------------------------------------------------------
// PnnLayer

PnnLayer::PnnLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_len,
                   int degree, Activation act, Padding padding)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_len_(kernel_len),
      degree_(degree),
      act_(act),
      padding_(padding),
      weights_(out_channels * in_channels * kernel_len * static_cast<std::size_t>(degree), 0.0),
      biases_(out_channels, 0.0) {
    if (in_channels == 0 || out_channels == 0 || kernel_len == 0 || degree < 1) {
        throw TopologyError("pnn layer: channels, kernel length and degree must be positive");
    }
}

std::string PnnLayer::describe() const {
    return "pnn " + std::to_string(out_channels_) + " " + std::to_string(kernel_len_) + " " +
           std::to_string(degree_) + " " + act_.name();
}

Shape PnnLayer::out_shape(Shape in) const {
    if (in.channels != in_channels_) throw TopologyError("pnn layer: channel mismatch");
    if (padding_ == Padding::same) return {out_channels_, in.samples};
    if (kernel_len_ > in.samples) throw TopologyError("pnn layer: kernel longer than input");
    return {out_channels_, in.samples - kernel_len_ + 1};
}

Mat PnnLayer::pad_same(const Mat& in) const {
    const std::size_t pad = kernel_len_ - 1;
    const std::size_t left = pad / 2;  // odd deficits put the extra zero on the right
    Mat padded(in.rows(), in.cols() + pad, 0.0);
    for (std::size_t r = 0; r < in.rows(); ++r) {
        std::copy(in.row(r), in.row(r) + in.cols(), padded.row(r) + left);
    }
    return padded;
}

Mat PnnLayer::forward(const Mat& in, LayerCache* cache) const {
    if (in.rows() != in_channels_) throw DimensionError("pnn forward: channel mismatch");
    const Mat& x = (padding_ == Padding::same) ? pad_same(in) : in;
    if (kernel_len_ > x.cols()) throw DimensionError("pnn forward: kernel longer than input");
    const std::size_t m_prev = x.cols();
    const std::size_t m_out = m_prev - kernel_len_ + 1;

    // Input powers are computed once per layer and shared by all neurons.
    std::vector<Mat> powers;
    powers.reserve(static_cast<std::size_t>(degree_));
    powers.push_back(x);
    for (int d = 2; d <= degree_; ++d) powers.push_back(hadamard(powers.back(), x));

    Mat preact(out_channels_, m_out);
    for (std::size_t i = 0; i < out_channels_; ++i) {
        double* out_row = preact.row(i);
        std::fill(out_row, out_row + m_out, biases_[i]);
        for (int d = 1; d <= degree_; ++d) {
            const Mat& pd = powers[static_cast<std::size_t>(d - 1)];
            for (std::size_t j = 0; j < in_channels_; ++j) {
                valid_corr_acc(pd.row(j), m_prev, &weights_[weight_index(i, j, d, 0)], kernel_len_,
                               out_row);
            }
        }
    }

    Mat out(out_channels_, m_out);
    for (std::size_t i = 0; i < out_channels_; ++i) {
        act_.apply_row(preact.row(i), out.row(i), m_out);
    }

    if (cache) {
        cache->input = x;
        cache->powers = std::move(powers);
        cache->preact = preact;
        cache->output = out;
    }
    return out;
}

Mat PnnLayer::backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const {
    const std::size_t m_out = cache.preact.cols();
    const std::size_t m_prev = cache.input.cols();
    if (grad_out.rows() != out_channels_ || grad_out.cols() != m_out) {
        throw DimensionError("pnn backward: gradient shape mismatch");
    }
    if (grads.weights.size() != weights_.size() || grads.biases.size() != biases_.size()) {
        throw DimensionError("pnn backward: gradient buffer shape mismatch");
    }

    // dE/dX = dE/dY o f'(X); softmax is fused with the loss upstream, so the
    // incoming gradient is already with respect to X.
    Mat grad_pre = grad_out;
    if (!act_.is_softmax()) {
        for (std::size_t i = 0; i < out_channels_; ++i) {
            double* g = grad_pre.row(i);
            const double* xp = cache.preact.row(i);
            for (std::size_t m = 0; m < m_out; ++m) g[m] *= act_.deriv(xp[m]);
        }
    }

    // Weight gradient: dE/dw_ijd = dE/dX_i correlated against input^d_j.
    for (std::size_t i = 0; i < out_channels_; ++i) {
        const double* gi = grad_pre.row(i);
        for (int d = 1; d <= degree_; ++d) {
            const Mat& pd = cache.powers[static_cast<std::size_t>(d - 1)];
            for (std::size_t j = 0; j < in_channels_; ++j) {
                valid_corr_acc(pd.row(j), m_prev, gi, m_out,
                               &grads.weights[weight_index(i, j, d, 0)]);
            }
        }
        double acc = 0.0;
        for (std::size_t m = 0; m < m_out; ++m) acc += gi[m];
        grads.biases[i] += acc;
    }

    // Output gradient of the previous layer: for each input channel j,
    // sum over degrees of d * (sum over neurons of the rotated-kernel full
    // correlation with dE/dX) times input^(d-1)_j.
    Mat grad_in(in_channels_, m_prev, 0.0);
    Vec spread(m_prev);
    for (std::size_t j = 0; j < in_channels_; ++j) {
        double* gj = grad_in.row(j);
        for (int d = 1; d <= degree_; ++d) {
            std::fill(spread.begin(), spread.end(), 0.0);
            for (std::size_t i = 0; i < out_channels_; ++i) {
                full_corr_flipped_acc(grad_pre.row(i), m_out, &weights_[weight_index(i, j, d, 0)],
                                      kernel_len_, spread.data());
            }
            if (d == 1) {
                for (std::size_t m = 0; m < m_prev; ++m) gj[m] += spread[m];
            } else {
                const double* pm = cache.powers[static_cast<std::size_t>(d - 2)].row(j);
                const double dd = static_cast<double>(d);
                for (std::size_t m = 0; m < m_prev; ++m) gj[m] += dd * spread[m] * pm[m];
            }
        }
    }

    if (padding_ == Padding::same) {
        const std::size_t left = (kernel_len_ - 1) / 2;
        Mat clipped(in_channels_, m_out);
        for (std::size_t j = 0; j < in_channels_; ++j) {
            std::copy(grad_in.row(j) + left, grad_in.row(j) + left + m_out, clipped.row(j));
        }
        return clipped;
    }
    return grad_in;
}

// ---------------------------------------------------------------------------
// MaxPool2Layer

Shape MaxPool2Layer::out_shape(Shape in) const {
    if (in.samples < 2) throw TopologyError("maxpool2: needs at least 2 samples");
    return {in.channels, in.samples / 2};
}

Mat MaxPool2Layer::forward(const Mat& in, LayerCache* cache) const {
    const std::size_t m_out = in.cols() / 2;
    Mat out(in.rows(), m_out);
    std::vector<std::size_t> argmax(in.rows() * m_out);
    for (std::size_t r = 0; r < in.rows(); ++r) {
        auto [vals, args] = max_pairs(in.row_vec(r));
        std::copy(vals.begin(), vals.end(), out.row(r));
        std::copy(args.begin(), args.end(), argmax.begin() + r * m_out);
    }
    if (cache) {
        cache->input = in;
        cache->output = out;
        cache->argmax = std::move(argmax);
    }
    return out;
}

Mat MaxPool2Layer::backward(const Mat& grad_out, const LayerCache& cache, LayerGrads&) const {
    const std::size_t m_out = grad_out.cols();
    if (cache.argmax.size() != grad_out.rows() * m_out) {
        throw DimensionError("maxpool2 backward: cache mismatch");
    }
    Mat grad_in(cache.input.rows(), cache.input.cols(), 0.0);
    for (std::size_t r = 0; r < grad_out.rows(); ++r) {
        for (std::size_t c = 0; c < m_out; ++c) {
            grad_in(r, cache.argmax[r * m_out + c]) += grad_out(r, c);
        }
    }
    return grad_in;
}

// ---------------------------------------------------------------------------
// Upsample2Layer

Shape Upsample2Layer::out_shape(Shape in) const { return {in.channels, in.samples * 2}; }

Mat Upsample2Layer::forward(const Mat& in, LayerCache* cache) const {
    Mat out(in.rows(), in.cols() * 2);
    for (std::size_t r = 0; r < in.rows(); ++r) {
        const Vec rep = repeat_each(in.row_vec(r));
        std::copy(rep.begin(), rep.end(), out.row(r));
    }
    if (cache) {
        cache->input = in;
        cache->output = out;
    }
    return out;
}

Mat Upsample2Layer::backward(const Mat& grad_out, const LayerCache& cache, LayerGrads&) const {
    if (grad_out.cols() != cache.input.cols() * 2) {
        throw DimensionError("upsample2 backward: gradient shape mismatch");
    }
    Mat grad_in(cache.input.rows(), cache.input.cols());
    for (std::size_t r = 0; r < grad_in.rows(); ++r) {
        for (std::size_t c = 0; c < grad_in.cols(); ++c) {
            grad_in(r, c) = grad_out(r, 2 * c) + grad_out(r, 2 * c + 1);
        }
    }
    return grad_in;
}

// ---------------------------------------------------------------------------
// FlattenLayer

Shape FlattenLayer::out_shape(Shape in) const { return {1, in.channels * in.samples}; }

Mat FlattenLayer::forward(const Mat& in, LayerCache* cache) const {
    Mat out(1, in.size());
    std::copy(in.data(), in.data() + in.size(), out.data());
    if (cache) {
        cache->input = in;
        cache->output = out;
    }
    return out;
}

Mat FlattenLayer::backward(const Mat& grad_out, const LayerCache& cache, LayerGrads&) const {
    if (grad_out.size() != cache.input.size()) {
        throw DimensionError("flatten backward: gradient shape mismatch");
    }
    Mat grad_in(cache.input.rows(), cache.input.cols());
    std::copy(grad_out.data(), grad_out.data() + grad_out.size(), grad_in.data());
    return grad_in;
}

// ---------------------------------------------------------------------------
// DenseLayer

DenseLayer::DenseLayer(std::size_t in_len, std::size_t units, Activation act)
    : in_len_(in_len), units_(units), act_(act), weights_(units * in_len, 0.0), biases_(units, 0.0) {
    if (in_len == 0 || units == 0) throw TopologyError("dense layer: zero size");
}

std::string DenseLayer::describe() const {
    return "dense " + std::to_string(units_) + " " + act_.name();
}

Shape DenseLayer::out_shape(Shape in) const {
    if (in.channels != 1) throw TopologyError("dense layer: input must be flattened");
    if (in.samples != in_len_) throw TopologyError("dense layer: input length mismatch");
    return {1, units_};
}

Mat DenseLayer::forward(const Mat& in, LayerCache* cache) const {
    if (in.rows() != 1 || in.cols() != in_len_) throw DimensionError("dense forward: shape mismatch");
    Mat preact(1, units_);
    const double* x = in.row(0);
    for (std::size_t u = 0; u < units_; ++u) {
        const double* wrow = &weights_[u * in_len_];
        double acc = biases_[u];
        for (std::size_t m = 0; m < in_len_; ++m) acc += wrow[m] * x[m];
        preact(0, u) = acc;
    }
    Mat out(1, units_);
    act_.apply_row(preact.row(0), out.row(0), units_);
    if (cache) {
        cache->input = in;
        cache->preact = preact;
        cache->output = out;
    }
    return out;
}

Mat DenseLayer::backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const {
    if (grad_out.rows() != 1 || grad_out.cols() != units_) {
        throw DimensionError("dense backward: gradient shape mismatch");
    }
    Vec grad_pre(units_);
    for (std::size_t u = 0; u < units_; ++u) {
        grad_pre[u] =
            act_.is_softmax() ? grad_out(0, u) : grad_out(0, u) * act_.deriv(cache.preact(0, u));
    }
    const double* x = cache.input.row(0);
    Mat grad_in(1, in_len_, 0.0);
    for (std::size_t u = 0; u < units_; ++u) {
        const double g = grad_pre[u];
        double* gw = &grads.weights[u * in_len_];
        const double* wrow = &weights_[u * in_len_];
        double* gi = grad_in.row(0);
        for (std::size_t m = 0; m < in_len_; ++m) {
            gw[m] += g * x[m];
            gi[m] += g * wrow[m];
        }
        grads.biases[u] += g;
    }
    return grad_in;
}

// ---------------------------------------------------------------------------
// Initialization

void init_layer(Layer& layer, Rng& rng) {
    if (auto* pnn = dynamic_cast<PnnLayer*>(&layer)) {
        const std::size_t fan_in = pnn->in_channels() * pnn->kernel_len();
        const std::size_t fan_out = pnn->out_channels() * pnn->kernel_len();
        const double limit = glorot_limit(fan_in, fan_out);
        auto w = pnn->weights();
        for (std::size_t i = 0; i < pnn->out_channels(); ++i) {
            for (std::size_t j = 0; j < pnn->in_channels(); ++j) {
                for (int d = 1; d <= pnn->degree(); ++d) {
                    const double div = factorial(d);
                    for (std::size_t k = 0; k < pnn->kernel_len(); ++k) {
                        w[pnn->weight_index(i, j, d, k)] = rng.uniform(-limit, limit) / div;
                    }
                }
            }
        }
        std::fill(pnn->biases().begin(), pnn->biases().end(), 0.0);
        return;
    }
    if (auto* dense = dynamic_cast<DenseLayer*>(&layer)) {
        const double limit = glorot_limit(dense->in_len(), dense->units());
        for (double& v : dense->weights()) v = rng.uniform(-limit, limit);
        std::fill(dense->biases().begin(), dense->biases().end(), 0.0);
        return;
    }
}

}  // namespace polywave
