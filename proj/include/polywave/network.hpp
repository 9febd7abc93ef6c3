// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "polywave/layer.hpp"

namespace polywave {

enum class LayerKind { pnn, conv, maxpool2, upsample2, flatten, dense };

/// One line of a topology file. `conv` is `pnn` with degree pinned to 1; the
/// two kinds are kept distinct so emitted files preserve their source form.
struct LayerSpec {
    LayerKind kind = LayerKind::pnn;
    std::size_t units = 0;   // neurons (pnn/conv/dense)
    std::size_t kernel = 0;  // taps (pnn/conv)
    int degree = 1;          // pnn only
    Act act = Act::identity;

    bool is_convolutional() const { return kind == LayerKind::pnn || kind == LayerKind::conv; }
    int effective_degree() const { return kind == LayerKind::conv ? 1 : degree; }
    bool operator==(const LayerSpec&) const = default;
};

struct NetworkSpec {
    std::size_t in_channels = 1;
    std::size_t in_samples = 0;
    Padding padding = Padding::valid;
    std::vector<LayerSpec> layers;

    bool operator==(const NetworkSpec&) const = default;
};

/// Parses the one-layer-per-line topology format:
///   input <channels> <samples>
///   padding <valid|same>
///   pnn <N> <K> <D> <activation>
///   conv <N> <K> <activation>
///   maxpool2 | upsample2 | flatten
///   dense <units> <activation>
/// Blank lines and '#' comments are skipped. Throws TopologyError.
NetworkSpec parse_topology(const std::string& text);
NetworkSpec load_topology(const std::filesystem::path& path);

/// Canonical emission; parse(emit(s)) == s.
std::string emit_topology(const NetworkSpec& spec);

/// Validates shape composition and returns each layer's output shape.
std::vector<Shape> shape_trace(const NetworkSpec& spec);

/// Total trainable parameters, dense heads included.
std::size_t param_count(const NetworkSpec& spec);

/// A sequential network built from a spec. Parameters start at zero; call
/// init_params or load_model to populate them.
class Network {
public:
    explicit Network(NetworkSpec spec);

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;

    const NetworkSpec& spec() const { return spec_; }
    std::size_t layer_count() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }

    Shape in_shape() const { return {spec_.in_channels, spec_.in_samples}; }
    Shape out_shape() const { return shapes_.empty() ? in_shape() : shapes_.back(); }
    const std::vector<Shape>& layer_shapes() const { return shapes_; }

    std::size_t param_count() const;

    /// Deterministic Glorot/d! initialization of every parametric layer.
    void init_params(std::uint64_t seed);

    Mat forward(const Mat& input) const;
    Mat forward(const Mat& input, std::vector<LayerCache>& caches) const;

    /// Parameters in declaration order, weights before biases per layer.
    void copy_params_to(Vec& flat) const;
    void copy_params_from(const Vec& flat);

private:
    void check_input(const Mat& input) const;

    NetworkSpec spec_;
    std::vector<std::unique_ptr<Layer>> layers_;
    std::vector<Shape> shapes_;
};

/// Model file: 8-byte magic, little-endian version, topology text, seed,
/// metadata text, and the flat parameter payload as little-endian 64-bit
/// reals. Round-trips bit-exactly.
void save_model(const Network& net, const std::filesystem::path& path, std::uint64_t seed,
                const std::string& metadata);

struct LoadedModel {
    Network net;
    std::uint64_t seed = 0;
    std::string metadata;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace polywave
