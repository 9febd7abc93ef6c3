// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polywave/audio.hpp"

namespace polywave {

namespace {
constexpr double kPi = 3.14159265358979323846;

double adsr_at(const AdsrEnvelope& env, double t01) {
    const double sustain_start = env.attack + env.decay;
    const double release_start = 1.0 - env.release;
    if (t01 < env.attack) return t01 / env.attack;
    if (t01 < sustain_start) {
        const double k = (t01 - env.attack) / env.decay;
        return 1.0 + k * (env.sustain_level - 1.0);
    }
    if (t01 < release_start) return env.sustain_level;
    return env.sustain_level * (1.0 - t01) / env.release;
}
}  // namespace

ToneSpec ToneSpec::defaults() {
    ToneSpec spec;
    // Arithmetic, non-octave fundamentals so no class sits on another's harmonic.
    spec.fundamentals_hz = {200.0, 290.0, 380.0, 470.0, 560.0, 650.0, 740.0, 830.0};
    return spec;
}

LabeledSignals gen_tones(const ToneSpec& spec, std::size_t n_per_class, std::uint64_t seed) {
    if (spec.class_count < 1) throw std::invalid_argument("gen_tones: need at least one class");
    std::vector<double> fundamentals = spec.fundamentals_hz;
    if (fundamentals.empty()) fundamentals = ToneSpec::defaults().fundamentals_hz;
    if (fundamentals.size() < spec.class_count) {
        throw std::invalid_argument("gen_tones: fewer fundamentals than classes");
    }

    const std::size_t len =
        static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate));
    if (len < 2) throw std::invalid_argument("gen_tones: duration too short");

    LabeledSignals out;
    out.sample_rate = spec.sample_rate;
    out.signals.reserve(spec.class_count * n_per_class);
    out.labels.reserve(spec.class_count * n_per_class);

    for (std::size_t c = 0; c < spec.class_count; ++c) {
        for (std::size_t s = 0; s < n_per_class; ++s) {
            Rng rng(mix_seed(mix_seed(seed, spec.jitter_seed), c * 1000003 + s));
            const double detune = rng.uniform(-spec.detune_frac, spec.detune_frac);
            const double f0 = fundamentals[c] * (1.0 + detune);

            std::vector<double> phases(spec.harmonic_amps.size());
            for (double& p : phases) p = rng.uniform(0.0, 2.0 * kPi);

            Vec sig(len, 0.0);
            for (std::size_t i = 0; i < len; ++i) {
                const double t = static_cast<double>(i) / spec.sample_rate;
                double v = 0.0;
                for (std::size_t h = 0; h < spec.harmonic_amps.size(); ++h) {
                    v += spec.harmonic_amps[h] *
                         std::sin(2.0 * kPi * f0 * static_cast<double>(h + 1) * t + phases[h]);
                }
                const double jitter = 1.0 + rng.uniform(-spec.amp_jitter, spec.amp_jitter);
                const double t01 = static_cast<double>(i) / static_cast<double>(len - 1);
                sig[i] = v * jitter * adsr_at(spec.envelope, t01);
            }
            double peak = 0.0;
            for (double v : sig) peak = std::max(peak, std::fabs(v));
            if (peak > 0.0) {
                const double gain = spec.peak / peak;
                for (double& v : sig) v *= gain;
            }
            out.signals.push_back(std::move(sig));
            out.labels.push_back(static_cast<int>(c));
        }
    }
    return out;
}

Vec gen_clean_mixture(std::size_t len, double sample_rate, Rng& rng) {
    // Carriers sit well below the pooled Nyquist rate so the pooling and
    // upsampling stages of small denoisers can reproduce them faithfully;
    // moderate AM depth keeps the energy envelope speech-like.
    const std::size_t components = 2 + rng.below(3);  // 2..4
    Vec sig(len, 0.0);
    for (std::size_t k = 0; k < components; ++k) {
        const double carrier = rng.uniform(300.0, 900.0);
        const double am_freq = rng.uniform(1.0, 10.0);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double am_phase = rng.uniform(0.0, 2.0 * kPi);
        const double amp = rng.uniform(0.5, 1.0);
        for (std::size_t i = 0; i < len; ++i) {
            const double t = static_cast<double>(i) / sample_rate;
            const double am = 0.7 + 0.3 * std::sin(2.0 * kPi * am_freq * t + am_phase);
            sig[i] += amp * am * std::sin(2.0 * kPi * carrier * t + phase);
        }
    }
    double peak = 0.0;
    for (double v : sig) peak = std::max(peak, std::fabs(v));
    if (peak > 0.0) {
        const double gain = 0.4 / peak;
        for (double& v : sig) v *= gain;
    }
    return sig;
}

DenoisePairs gen_denoise_pairs(std::size_t n, std::size_t len, std::uint64_t seed, double snr_db) {
    if (len < 2) throw std::invalid_argument("gen_denoise_pairs: window too short");
    DenoisePairs pairs;
    pairs.clean.reserve(n);
    pairs.noisy.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, i));
        Vec clean = gen_clean_mixture(len, 16000.0, rng);
        Vec noisy = add_awgn(clean, snr_db, mix_seed(seed, 0x514e00 + i));
        pairs.clean.push_back(std::move(clean));
        pairs.noisy.push_back(std::move(noisy));
    }
    return pairs;
}

}  // namespace polywave
