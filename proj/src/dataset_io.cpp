// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#include "polywave/dataset_io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "polywave/errors.hpp"

namespace polywave {

namespace fs = std::filesystem;

void write_f64(const fs::path& path, const Vec& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write array file: " + path.string());
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(b), 8);
    }
    if (!out) throw IoError("short write to array file: " + path.string());
}

Vec read_f64(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open array file: " + path.string());
    const std::streamoff bytes = in.tellg();
    if (bytes % 8 != 0) throw IoError("array file size is not a multiple of 8: " + path.string());
    in.seekg(0);
    Vec values(static_cast<std::size_t>(bytes / 8));
    for (double& v : values) {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        std::memcpy(&v, &bits, 8);
    }
    if (!in) throw IoError("truncated array file: " + path.string());
    return values;
}

static void write_rate(const fs::path& dir, double rate) {
    std::ofstream out(dir / "rate.txt");
    if (!out) throw IoError("cannot write rate file in " + dir.string());
    out << std::setprecision(17) << rate << "\n";
}

static double read_rate(const fs::path& dir) {
    std::ifstream in(dir / "rate.txt");
    if (!in) throw IoError("missing rate.txt in " + dir.string());
    double rate = 0.0;
    in >> rate;
    if (!in || rate <= 0.0) throw IoError("bad rate.txt in " + dir.string());
    return rate;
}

static std::string numbered(const char* prefix, std::size_t i) {
    std::ostringstream name;
    name << prefix << "_" << std::setw(5) << std::setfill('0') << i << ".f64";
    return name.str();
}

void write_labeled_signals(const fs::path& dir, const LabeledSignals& data) {
    fs::create_directories(dir);
    write_rate(dir, data.sample_rate);
    std::ofstream labels(dir / "labels.csv");
    if (!labels) throw IoError("cannot write labels.csv in " + dir.string());
    labels << "file,label\n";
    for (std::size_t i = 0; i < data.signals.size(); ++i) {
        const std::string name = numbered("sig", i);
        write_f64(dir / name, data.signals[i]);
        labels << name << "," << data.labels[i] << "\n";
    }
}

LabeledSignals read_labeled_signals(const fs::path& dir) {
    LabeledSignals data;
    data.sample_rate = read_rate(dir);
    std::ifstream labels(dir / "labels.csv");
    if (!labels) throw IoError("missing labels.csv in " + dir.string());
    std::string line;
    std::getline(labels, line);  // header
    while (std::getline(labels, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("bad labels.csv row: " + line);
        data.signals.push_back(read_f64(dir / line.substr(0, comma)));
        data.labels.push_back(std::stoi(line.substr(comma + 1)));
    }
    return data;
}

void write_denoise_pairs(const fs::path& dir, const DenoisePairs& pairs, double sample_rate) {
    fs::create_directories(dir);
    write_rate(dir, sample_rate);
    std::ofstream index(dir / "pairs.csv");
    if (!index) throw IoError("cannot write pairs.csv in " + dir.string());
    index << "clean,noisy\n";
    for (std::size_t i = 0; i < pairs.clean.size(); ++i) {
        const std::string clean_name = numbered("clean", i);
        const std::string noisy_name = numbered("noisy", i);
        write_f64(dir / clean_name, pairs.clean[i]);
        write_f64(dir / noisy_name, pairs.noisy[i]);
        index << clean_name << "," << noisy_name << "\n";
    }
}

DenoisePairs read_denoise_pairs(const fs::path& dir, double* sample_rate) {
    const double rate = read_rate(dir);
    if (sample_rate) *sample_rate = rate;
    std::ifstream index(dir / "pairs.csv");
    if (!index) throw IoError("missing pairs.csv in " + dir.string());
    DenoisePairs pairs;
    std::string line;
    std::getline(index, line);  // header
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("bad pairs.csv row: " + line);
        pairs.clean.push_back(read_f64(dir / line.substr(0, comma)));
        pairs.noisy.push_back(read_f64(dir / line.substr(comma + 1)));
    }
    return pairs;
}

bool is_denoise_dataset(const fs::path& dir) { return fs::exists(dir / "pairs.csv"); }

}  // namespace polywave
