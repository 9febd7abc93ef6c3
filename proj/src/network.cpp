// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/network.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "polywave/errors.hpp"

namespace polywave {

// ---------------------------------------------------------------------------
// Topology text format

NetworkSpec parse_topology(const std::string& text) {
    NetworkSpec spec;
    bool have_input = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;

        auto need_size = [&](const char* what) {
            long long v = -1;
            if (!(ls >> v) || v < 1) throw TopologyError(std::string("topology: bad ") + what);
            return static_cast<std::size_t>(v);
        };
        auto need_act = [&] {
            std::string name;
            if (!(ls >> name)) throw TopologyError("topology: missing activation");
            return Activation::from_name(name).id;
        };

        if (word == "input") {
            spec.in_channels = need_size("input channels");
            spec.in_samples = need_size("input samples");
            have_input = true;
        } else if (word == "padding") {
            std::string mode;
            if (!(ls >> mode)) throw TopologyError("topology: missing padding mode");
            if (mode == "valid") {
                spec.padding = Padding::valid;
            } else if (mode == "same") {
                spec.padding = Padding::same;
            } else {
                throw TopologyError("topology: unknown padding mode " + mode);
            }
        } else if (word == "pnn") {
            LayerSpec l;
            l.kind = LayerKind::pnn;
            l.units = need_size("pnn neuron count");
            l.kernel = need_size("pnn kernel length");
            l.degree = static_cast<int>(need_size("pnn degree"));
            l.act = need_act();
            spec.layers.push_back(l);
        } else if (word == "conv") {
            LayerSpec l;
            l.kind = LayerKind::conv;
            l.units = need_size("conv neuron count");
            l.kernel = need_size("conv kernel length");
            l.degree = 1;
            l.act = need_act();
            spec.layers.push_back(l);
        } else if (word == "maxpool2") {
            spec.layers.push_back({LayerKind::maxpool2});
        } else if (word == "upsample2") {
            spec.layers.push_back({LayerKind::upsample2});
        } else if (word == "flatten") {
            spec.layers.push_back({LayerKind::flatten});
        } else if (word == "dense") {
            LayerSpec l;
            l.kind = LayerKind::dense;
            l.units = need_size("dense units");
            l.act = need_act();
            spec.layers.push_back(l);
        } else {
            throw TopologyError("topology: unknown layer kind " + word);
        }
        std::string extra;
        if (ls >> extra) throw TopologyError("topology: trailing tokens after " + word);
    }
    if (!have_input) throw TopologyError("topology: missing input line");
    return spec;
}

NetworkSpec load_topology(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open topology file: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_topology(text.str());
}

std::string emit_topology(const NetworkSpec& spec) {
    std::ostringstream out;
    out << "input " << spec.in_channels << " " << spec.in_samples << "\n";
    out << "padding " << (spec.padding == Padding::same ? "same" : "valid") << "\n";
    for (const LayerSpec& l : spec.layers) {
        switch (l.kind) {
            case LayerKind::pnn:
                out << "pnn " << l.units << " " << l.kernel << " " << l.degree << " "
                    << Activation{l.act}.name() << "\n";
                break;
            case LayerKind::conv:
                out << "conv " << l.units << " " << l.kernel << " " << Activation{l.act}.name()
                    << "\n";
                break;
            case LayerKind::maxpool2: out << "maxpool2\n"; break;
            case LayerKind::upsample2: out << "upsample2\n"; break;
            case LayerKind::flatten: out << "flatten\n"; break;
            case LayerKind::dense:
                out << "dense " << l.units << " " << Activation{l.act}.name() << "\n";
                break;
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Shape and parameter arithmetic

std::vector<Shape> shape_trace(const NetworkSpec& spec) {
    if (spec.in_channels < 1 || spec.in_samples < 1) {
        throw TopologyError("topology: input shape must be positive");
    }
    std::vector<Shape> shapes;
    Shape cur{spec.in_channels, spec.in_samples};
    for (const LayerSpec& l : spec.layers) {
        switch (l.kind) {
            case LayerKind::pnn:
            case LayerKind::conv: {
                if (spec.padding == Padding::valid && l.kernel > cur.samples) {
                    throw TopologyError("topology: kernel longer than input");
                }
                const std::size_t m =
                    spec.padding == Padding::same ? cur.samples : cur.samples - l.kernel + 1;
                if (m < 1) throw TopologyError("topology: layer output is empty");
                cur = {l.units, m};
                break;
            }
            case LayerKind::maxpool2: {
                const std::size_t m = cur.samples / 2;
                if (m < 1) throw TopologyError("topology: maxpool2 output is empty");
                cur = {cur.channels, m};
                break;
            }
            case LayerKind::upsample2: cur = {cur.channels, cur.samples * 2}; break;
            case LayerKind::flatten: cur = {1, cur.channels * cur.samples}; break;
            case LayerKind::dense: {
                if (cur.channels != 1) throw TopologyError("topology: dense needs a flat input");
                cur = {1, l.units};
                break;
            }
        }
        shapes.push_back(cur);
    }
    return shapes;
}

std::size_t param_count(const NetworkSpec& spec) {
    std::size_t total = 0;
    Shape cur{spec.in_channels, spec.in_samples};
    const std::vector<Shape> shapes = spec.layers.empty() ? std::vector<Shape>{} : shape_trace(spec);
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        if (l.is_convolutional()) {
            total += l.units * cur.channels * l.kernel * static_cast<std::size_t>(l.effective_degree()) +
                     l.units;
        } else if (l.kind == LayerKind::dense) {
            total += l.units * cur.samples + l.units;
        }
        cur = shapes[i];
    }
    return total;
}

// ---------------------------------------------------------------------------
// Network

static std::unique_ptr<Layer> build_layer(const LayerSpec& l, Shape in, Padding padding) {
    switch (l.kind) {
        case LayerKind::pnn:
        case LayerKind::conv:
            return std::make_unique<PnnLayer>(in.channels, l.units, l.kernel, l.effective_degree(),
                                              Activation{l.act}, padding);
        case LayerKind::maxpool2: return std::make_unique<MaxPool2Layer>();
        case LayerKind::upsample2: return std::make_unique<Upsample2Layer>();
        case LayerKind::flatten: return std::make_unique<FlattenLayer>();
        case LayerKind::dense:
            return std::make_unique<DenseLayer>(in.samples, l.units, Activation{l.act});
    }
    throw TopologyError("unknown layer kind");
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
    shapes_ = shape_trace(spec_);
    Shape cur = in_shape();
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        layers_.push_back(build_layer(spec_.layers[i], cur, spec_.padding));
        cur = shapes_[i];
    }
}

std::size_t Network::param_count() const {
    std::size_t total = 0;
    for (const auto& l : layers_) total += l->param_count();
    return total;
}

void Network::init_params(std::uint64_t seed) {
    Rng rng(seed);
    for (auto& l : layers_) init_layer(*l, rng);
}

void Network::check_input(const Mat& input) const {
    if (input.rows() != spec_.in_channels || input.cols() != spec_.in_samples) {
        throw DimensionError("network forward: input shape does not match the spec");
    }
}

Mat Network::forward(const Mat& input) const {
    check_input(input);
    Mat cur = input;
    for (const auto& l : layers_) cur = l->forward(cur, nullptr);
    return cur;
}

Mat Network::forward(const Mat& input, std::vector<LayerCache>& caches) const {
    check_input(input);
    caches.resize(layers_.size());
    Mat cur = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        cur = layers_[i]->forward(cur, &caches[i]);
    }
    return cur;
}

void Network::copy_params_to(Vec& flat) const {
    flat.clear();
    flat.reserve(param_count());
    for (const auto& l : layers_) {
        const auto w = l->weights();
        const auto b = l->biases();
        flat.insert(flat.end(), w.begin(), w.end());
        flat.insert(flat.end(), b.begin(), b.end());
    }
}

void Network::copy_params_from(const Vec& flat) {
    if (flat.size() != param_count()) throw DimensionError("copy_params_from: payload size mismatch");
    std::size_t pos = 0;
    for (auto& l : layers_) {
        auto w = l->weights();
        std::copy(flat.begin() + pos, flat.begin() + pos + w.size(), w.begin());
        pos += w.size();
        auto b = l->biases();
        std::copy(flat.begin() + pos, flat.begin() + pos + b.size(), b.begin());
        pos += b.size();
    }
}

// ---------------------------------------------------------------------------
// Model file

namespace {

constexpr char kMagic[8] = {'P', 'O', 'L', 'Y', 'W', 'A', 'V', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

void put_string(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::string get_string(std::istream& in) {
    const std::uint64_t n = get_u64(in);
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

}  // namespace

void save_model(const Network& net, const std::filesystem::path& path, std::uint64_t seed,
                const std::string& metadata) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out.write(kMagic, 8);
    put_u32(out, kVersion);
    put_string(out, emit_topology(net.spec()));
    put_u64(out, seed);
    put_string(out, metadata);
    Vec flat;
    net.copy_params_to(flat);
    put_u64(out, flat.size());
    for (double v : flat) put_f64(out, v);
    if (!out) throw IoError("short write to model file: " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw IoError("not a model file: " + path.string());
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw IoError("unsupported model version " + std::to_string(version));
    }
    const std::string topology = get_string(in);
    const std::uint64_t seed = get_u64(in);
    const std::string metadata = get_string(in);
    const std::uint64_t n = get_u64(in);
    LoadedModel loaded{Network(parse_topology(topology)), seed, metadata};
    if (n != loaded.net.param_count()) {
        throw IoError("model payload does not match the topology");
    }
    Vec flat(n);
    for (std::uint64_t i = 0; i < n; ++i) flat[i] = get_f64(in);
    if (!in) throw IoError("truncated model file: " + path.string());
    loaded.net.copy_params_from(flat);
    return loaded;
}

}  // namespace polywave
