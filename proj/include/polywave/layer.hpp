// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "polywave/activation.hpp"
#include "polywave/rng.hpp"
#include "polywave/tensor.hpp"

namespace polywave {

struct Shape {
    std::size_t channels = 0;
    std::size_t samples = 0;
    bool operator==(const Shape&) const = default;
};

enum class Padding { valid, same };

/// Everything a layer needs back from its own forward pass to run backward.
/// Layers stay const through both passes; the cache is owned by the caller.
struct LayerCache {
    Mat input;                        // as consumed (zero-padded in same mode)
    Mat preact;                       // X_l
    Mat output;                       // Y_l
    std::vector<Mat> powers;          // powers[d-1] = input^d, polynomial layers only
    std::vector<std::size_t> argmax;  // winning source index per pooled sample
};

/// Parameter-shaped gradient buffers for one layer.
struct LayerGrads {
    Vec weights;
    Vec biases;
};

class Layer {
public:
    virtual ~Layer() = default;

    virtual std::string describe() const = 0;
    virtual Shape out_shape(Shape in) const = 0;

    /// Runs the layer on one feature map; fills *cache when given.
    virtual Mat forward(const Mat& in, LayerCache* cache) const = 0;

    /// Maps the loss gradient at the output back to the input, accumulating
    /// parameter gradients into `grads` (sized like the parameters; zero it
    /// before the first sample of a batch).
    virtual Mat backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const = 0;

    virtual std::size_t param_count() const { return 0; }
    virtual std::span<double> weights() { return {}; }
    virtual std::span<double> biases() { return {}; }
    virtual std::span<const double> weights() const { return {}; }
    virtual std::span<const double> biases() const { return {}; }
    virtual const Activation* activation() const { return nullptr; }

    LayerGrads zero_grads() const { return {Vec(weights().size(), 0.0), Vec(biases().size(), 0.0)}; }
};

/// Polynomial convolution layer: the pre-activation of neuron i is the sum
/// over degrees d of the sliding dot products between its degree-d kernels
/// and the elementwise d-th power of the input map, plus one bias.
/// Degree 1 is the plain convolution layer.
class PnnLayer : public Layer {
public:
    PnnLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_len, int degree,
             Activation act, Padding padding = Padding::valid);

    std::string describe() const override;
    Shape out_shape(Shape in) const override;
    Mat forward(const Mat& in, LayerCache* cache) const override;
    Mat backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const override;

    std::size_t param_count() const override {
        return out_channels_ * in_channels_ * kernel_len_ * static_cast<std::size_t>(degree_) +
               out_channels_;
    }
    std::span<double> weights() override { return weights_; }
    std::span<double> biases() override { return biases_; }
    std::span<const double> weights() const override { return weights_; }
    std::span<const double> biases() const override { return biases_; }
    const Activation* activation() const override { return &act_; }

    std::size_t in_channels() const { return in_channels_; }
    std::size_t out_channels() const { return out_channels_; }
    std::size_t kernel_len() const { return kernel_len_; }
    int degree() const { return degree_; }
    Padding padding() const { return padding_; }

    // weight layout: [out][in][degree][tap], degree index is d-1
    std::size_t weight_index(std::size_t i, std::size_t j, int d, std::size_t k) const {
        return ((i * in_channels_ + j) * static_cast<std::size_t>(degree_) +
                static_cast<std::size_t>(d - 1)) *
                   kernel_len_ +
               k;
    }
    double& w(std::size_t i, std::size_t j, int d, std::size_t k) {
        return weights_[weight_index(i, j, d, k)];
    }
    double w(std::size_t i, std::size_t j, int d, std::size_t k) const {
        return weights_[weight_index(i, j, d, k)];
    }

private:
    Mat pad_same(const Mat& in) const;

    std::size_t in_channels_;
    std::size_t out_channels_;
    std::size_t kernel_len_;
    int degree_;
    Activation act_;
    Padding padding_;
    Vec weights_;
    Vec biases_;
};

/// Max pooling over non-overlapping sample pairs; odd tails are dropped.
class MaxPool2Layer : public Layer {
public:
    std::string describe() const override { return "maxpool2"; }
    Shape out_shape(Shape in) const override;
    Mat forward(const Mat& in, LayerCache* cache) const override;
    Mat backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const override;
};

/// Repeats every sample twice.
class Upsample2Layer : public Layer {
public:
    std::string describe() const override { return "upsample2"; }
    Shape out_shape(Shape in) const override;
    Mat forward(const Mat& in, LayerCache* cache) const override;
    Mat backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const override;
};

/// Concatenates channels into a single row, row-major.
class FlattenLayer : public Layer {
public:
    std::string describe() const override { return "flatten"; }
    Shape out_shape(Shape in) const override;
    Mat forward(const Mat& in, LayerCache* cache) const override;
    Mat backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const override;
};

/// Fully connected layer on a flattened (single-channel) map.
class DenseLayer : public Layer {
public:
    DenseLayer(std::size_t in_len, std::size_t units, Activation act);

    std::string describe() const override;
    Shape out_shape(Shape in) const override;
    Mat forward(const Mat& in, LayerCache* cache) const override;
    Mat backward(const Mat& grad_out, const LayerCache& cache, LayerGrads& grads) const override;

    std::size_t param_count() const override { return units_ * in_len_ + units_; }
    std::span<double> weights() override { return weights_; }
    std::span<double> biases() override { return biases_; }
    std::span<const double> weights() const override { return weights_; }
    std::span<const double> biases() const override { return biases_; }
    const Activation* activation() const override { return &act_; }

    std::size_t in_len() const { return in_len_; }
    std::size_t units() const { return units_; }

private:
    std::size_t in_len_;
    std::size_t units_;
    Activation act_;
    Vec weights_;  // units x in_len, row-major
    Vec biases_;
};

/// Glorot normalized uniform bounds for a weight slab.
double glorot_limit(std::size_t fan_in, std::size_t fan_out);

/// Draws layer weights from the Glorot normalized uniform law, dividing the
/// degree-d slab of a polynomial layer by d!. Biases are zeroed. Layers
/// without parameters are left untouched.
void init_layer(Layer& layer, Rng& rng);

double factorial(int n);

}  // namespace polywave
