#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecoc/decoding.hpp"
#include "ecoc/pseudolabel.hpp"

namespace ecoc {

struct CalibSample {
    double confidence = 0.0;
    bool correct = false;
};

struct ReliabilityBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double mean_confidence = 0.0;  // 0 for empty bins
    double accuracy = 0.0;         // 0 for empty bins
};

struct ReliabilityBins {
    std::vector<ReliabilityBin> bins;
    std::size_t total = 0;
};

// One sample per (pixel, bit): confidence q_k, correct iff round(p_k) equals
// the target bit. probs is row-major P x K; targets must hold P codes.
std::vector<CalibSample> bit_level_samples(std::span<const double> probs, std::size_t code_length,
                                           std::span<const PseudoCode> targets);

// Uniform bins on [0, 1], half-open except the last, which is closed at 1.
std::size_t bin_index(double confidence, std::size_t n_bins);

ReliabilityBins reliability_bins(std::span<const CalibSample> samples, std::size_t n_bins = 10);

// sum_m |B_m|/n |acc(B_m) - conf(B_m)|. Throws on empty input.
double ece(std::span<const CalibSample> samples, std::size_t n_bins = 10);
double ece_from_bins(const ReliabilityBins& bins);

// Entry C-1 is the fraction of pixels whose true class is among the C
// nearest codewords.
std::vector<double> topc_accuracy(std::span<const DecodeResult> results, std::span<const std::size_t> truth,
                                  std::size_t c_max);

}  // namespace ecoc
