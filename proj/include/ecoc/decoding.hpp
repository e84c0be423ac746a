#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecoc/codebook.hpp"

namespace ecoc {

// Clamp applied to probabilities before any logarithm.
inline constexpr double kProbClip = 1e-7;

struct DecodeResult {
    std::size_t class_index = 0;
    std::vector<double> distances;     // soft Hamming distance per class, in [0, 1]
    std::vector<std::size_t> ranked;   // ascending distance, ties by class index
};

// (1/K) sum_k |p_k - c_k|. Throws std::invalid_argument on length mismatch.
double soft_hamming(std::span<const std::uint8_t> codeword, std::span<const double> probs);

DecodeResult decode(const Codebook& cb, std::span<const double> probs);

// Ranking only, without materialising a DecodeResult.
std::vector<std::size_t> rank_classes(std::span<const double> distances);

// q_k = max(p_k, 1 - p_k)
std::vector<double> bit_confidence(std::span<const double> probs);
double pixel_confidence(std::span<const double> probs);

double sigmoid(double x);
std::vector<double> sigmoid(std::span<const double> logits);

// Throws std::invalid_argument unless every entry lies in [0, 1].
void check_probabilities(std::span<const double> probs);

}  // namespace ecoc
