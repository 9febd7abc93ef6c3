// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "polywave/datagen.hpp"
#include "polywave/tensor.hpp"

namespace polywave {

/// Headerless binary array of little-endian 64-bit reals.
void write_f64(const std::filesystem::path& path, const Vec& values);
Vec read_f64(const std::filesystem::path& path);

/// Labeled-signal dataset directory:
///   rate.txt        sample rate
///   labels.csv      file,label
///   sig_NNNNN.f64   one signal per file
void write_labeled_signals(const std::filesystem::path& dir, const LabeledSignals& data);
LabeledSignals read_labeled_signals(const std::filesystem::path& dir);

/// Denoising-pair dataset directory:
///   rate.txt        sample rate
///   pairs.csv       clean_file,noisy_file
///   clean_NNNNN.f64 / noisy_NNNNN.f64
void write_denoise_pairs(const std::filesystem::path& dir, const DenoisePairs& pairs,
                         double sample_rate);
DenoisePairs read_denoise_pairs(const std::filesystem::path& dir, double* sample_rate = nullptr);

bool is_denoise_dataset(const std::filesystem::path& dir);

}  // namespace polywave
