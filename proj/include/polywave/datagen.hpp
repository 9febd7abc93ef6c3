// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "polywave/rng.hpp"
#include "polywave/tensor.hpp"

namespace polywave {

/// Attack/decay/release are fractions of the signal; the remainder sustains.
struct AdsrEnvelope {
    double attack = 0.05;
    double decay = 0.10;
    double sustain_level = 0.8;
    double release = 0.10;
};

/// Synthetic harmonic-tone classes standing in for annotated musical notes.
struct ToneSpec {
    std::size_t class_count = 8;
    std::vector<double> fundamentals_hz;  // filled by defaults() when empty
    std::vector<double> harmonic_amps = {1.0, 0.5, 0.25};
    AdsrEnvelope envelope;
    double sample_rate = 16000.0;
    double duration_s = 0.25;
    double detune_frac = 0.005;  // per-signal fundamental jitter bound
    double amp_jitter = 0.05;    // per-sample amplitude jitter bound
    double peak = 0.85;
    std::uint64_t jitter_seed = 0;

    static ToneSpec defaults();
};

struct LabeledSignals {
    std::vector<Vec> signals;
    std::vector<int> labels;
    double sample_rate = 16000.0;
};

/// n_per_class enveloped harmonic stacks per class, deterministic in
/// (spec, seed). Every signal stays within [-1, 1].
LabeledSignals gen_tones(const ToneSpec& spec, std::size_t n_per_class, std::uint64_t seed);

struct DenoisePairs {
    std::vector<Vec> clean;
    std::vector<Vec> noisy;
};

/// Clean signals are sums of 2-4 amplitude-modulated sinusoids with random
/// phases; noisy counterparts add white Gaussian noise at the target SNR.
DenoisePairs gen_denoise_pairs(std::size_t n, std::size_t len, std::uint64_t seed, double snr_db);

/// One clean AM-sinusoid mixture (the denoise-pair source signal), exposed
/// for building longer evaluation signals.
Vec gen_clean_mixture(std::size_t len, double sample_rate, Rng& rng);

}  // namespace polywave
