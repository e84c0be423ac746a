#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ecoc/codebook.hpp"

namespace ecoc {

using BitMask = std::vector<std::uint8_t>;

enum class LabelForm { bitwise, codewise, hybrid };

std::string_view to_string(LabelForm f);
LabelForm label_form_from_string(std::string_view name);

struct PseudoCode {
    std::vector<std::uint8_t> bits;
    LabelForm form = LabelForm::bitwise;
    std::optional<BitMask> mask;               // hybrid only
    std::optional<std::size_t> source_class;   // codewise and hybrid
};

// bit k = 1 iff p_k >= 0.5
PseudoCode bitwise_label(std::span<const double> probs);

// Codeword of the nearest class under soft Hamming distance.
PseudoCode codewise_label(const Codebook& cb, std::span<const double> probs);

// mask = 1 where every codeword agrees. Throws on an empty set or ragged lengths.
BitMask shared_part(std::span<const std::span<const std::uint8_t>> codewords);
BitMask shared_part(const Codebook& cb, std::span<const std::size_t> classes);

// mask = 1 where c1 and c2 differ.
BitMask distinct_part(std::span<const std::uint8_t> c1, std::span<const std::uint8_t> c2);

// Per-iteration record of the reliable bit mining loop, for diagnostics.
struct MiningTrace {
    std::vector<BitMask> masks;            // mask after each iteration
    std::vector<double> mean_confidence;   // NaN when the shared part is empty
    std::size_t candidates = 0;            // classes in the candidate set at break
};

// Grows a candidate set in order of soft Hamming distance and keeps the bits
// shared by every candidate; stops once the mean bit confidence over those
// bits exceeds T, or no bit is shared.
BitMask mine_reliable_bits(const Codebook& cb, std::span<const double> probs, double T,
                           MiningTrace* trace = nullptr);

// mask * codewise + (1 - mask) * bitwise
PseudoCode hybrid_label(const Codebook& cb, std::span<const double> probs, double T);

// Combines precomputed parts; used when the code-wise label is not the
// decoded class (noise injection in the simulator).
PseudoCode fuse_hybrid(const PseudoCode& codewise, const PseudoCode& bitwise, const BitMask& mask);

// Fraction of pixels with confidence > tau_prime. Throws on empty input.
double image_quality_weight(std::span<const double> pixel_confidences, double tau_prime);

// [confidence > tau_prime]
int threshold_filter(double pixel_confidence, double tau_prime);

}  // namespace ecoc
