#include "ecoc/pseudolabel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ecoc/decoding.hpp"

namespace ecoc {

std::string_view to_string(LabelForm f) {
    switch (f) {
        case LabelForm::bitwise: return "bitwise";
        case LabelForm::codewise: return "codewise";
        case LabelForm::hybrid: return "hybrid";
    }
    return "bitwise";
}

LabelForm label_form_from_string(std::string_view name) {
    if (name == "bitwise") return LabelForm::bitwise;
    if (name == "codewise") return LabelForm::codewise;
    if (name == "hybrid") return LabelForm::hybrid;
    throw std::invalid_argument("unknown label form '" + std::string(name) + "'");
}

PseudoCode bitwise_label(std::span<const double> probs) {
    PseudoCode out;
    out.form = LabelForm::bitwise;
    out.bits.resize(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) out.bits[k] = probs[k] >= 0.5 ? 1 : 0;
    return out;
}

PseudoCode codewise_label(const Codebook& cb, std::span<const double> probs) {
    const auto r = decode(cb, probs);
    PseudoCode out;
    out.form = LabelForm::codewise;
    const auto row = cb.row(r.class_index);
    out.bits.assign(row.begin(), row.end());
    out.source_class = r.class_index;
    return out;
}

BitMask shared_part(std::span<const std::span<const std::uint8_t>> codewords) {
    if (codewords.empty()) throw std::invalid_argument("shared_part: empty codeword set");
    const std::size_t k = codewords.front().size();
    BitMask mask(k, 1);
    for (const auto& c : codewords) {
        if (c.size() != k) throw std::invalid_argument("shared_part: codewords differ in length");
        for (std::size_t i = 0; i < k; ++i)
            if (c[i] != codewords.front()[i]) mask[i] = 0;
    }
    return mask;
}

BitMask shared_part(const Codebook& cb, std::span<const std::size_t> classes) {
    std::vector<std::span<const std::uint8_t>> rows;
    rows.reserve(classes.size());
    for (auto c : classes) rows.push_back(cb.row(c));
    return shared_part(rows);
}

BitMask distinct_part(std::span<const std::uint8_t> c1, std::span<const std::uint8_t> c2) {
    if (c1.size() != c2.size()) throw std::invalid_argument("distinct_part: length mismatch");
    BitMask mask(c1.size());
    for (std::size_t i = 0; i < c1.size(); ++i) mask[i] = c1[i] != c2[i] ? 1 : 0;
    return mask;
}

BitMask mine_reliable_bits(const Codebook& cb, std::span<const double> probs, double T, MiningTrace* trace) {
    const auto r = decode(cb, probs);
    const auto q = bit_confidence(probs);
    const std::size_t K = cb.code_length();

    BitMask mask(K, 1);
    const auto first = cb.row(r.ranked.front());
    for (std::size_t n = 0; n < r.ranked.size(); ++n) {
        // Adding a candidate can only clear bits, so the shared part is
        // maintained incrementally against the first candidate.
        const auto row = cb.row(r.ranked[n]);
        std::size_t kept = 0;
        double qsum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (row[k] != first[k]) mask[k] = 0;
            if (mask[k]) {
                ++kept;
                qsum += q[k];
            }
        }
        const double qm = kept ? qsum / static_cast<double>(kept) : std::numeric_limits<double>::quiet_NaN();
        if (trace) {
            trace->masks.push_back(mask);
            trace->mean_confidence.push_back(qm);
            trace->candidates = n + 1;
        }
        if (kept == 0 || qm > T) break;
    }
    return mask;
}

PseudoCode fuse_hybrid(const PseudoCode& codewise, const PseudoCode& bitwise, const BitMask& mask) {
    if (codewise.bits.size() != bitwise.bits.size() || mask.size() != bitwise.bits.size())
        throw std::invalid_argument("fuse_hybrid: length mismatch");
    PseudoCode out;
    out.form = LabelForm::hybrid;
    out.bits.resize(mask.size());
    for (std::size_t k = 0; k < mask.size(); ++k) out.bits[k] = mask[k] ? codewise.bits[k] : bitwise.bits[k];
    out.mask = mask;
    out.source_class = codewise.source_class;
    return out;
}

PseudoCode hybrid_label(const Codebook& cb, std::span<const double> probs, double T) {
    const auto mask = mine_reliable_bits(cb, probs, T);
    return fuse_hybrid(codewise_label(cb, probs), bitwise_label(probs), mask);
}

double image_quality_weight(std::span<const double> pixel_confidences, double tau_prime) {
    if (pixel_confidences.empty()) throw std::invalid_argument("image_quality_weight: empty input");
    std::size_t above = 0;
    for (double c : pixel_confidences) above += c > tau_prime;
    return static_cast<double>(above) / static_cast<double>(pixel_confidences.size());
}

int threshold_filter(double pixel_confidence, double tau_prime) { return pixel_confidence > tau_prime ? 1 : 0; }

}  // namespace ecoc
