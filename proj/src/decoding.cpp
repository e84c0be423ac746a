#include "ecoc/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ecoc {

double soft_hamming(std::span<const std::uint8_t> codeword, std::span<const double> probs) {
    if (codeword.size() != probs.size())
        throw std::invalid_argument("soft_hamming: codeword length " + std::to_string(codeword.size()) +
                                    " != probability length " + std::to_string(probs.size()));
    double sum = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) sum += std::abs(probs[k] - static_cast<double>(codeword[k]));
    return sum / static_cast<double>(probs.size());
}

std::vector<std::size_t> rank_classes(std::span<const double> distances) {
    std::vector<std::size_t> order(distances.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });
    return order;
}

DecodeResult decode(const Codebook& cb, std::span<const double> probs) {
    if (probs.size() != cb.code_length())
        throw std::invalid_argument("decode: probability length " + std::to_string(probs.size()) +
                                    " != code length " + std::to_string(cb.code_length()));
    DecodeResult r;
    r.distances.resize(cb.n_classes());
    for (std::size_t n = 0; n < cb.n_classes(); ++n) r.distances[n] = soft_hamming(cb.row(n), probs);
    r.ranked = rank_classes(r.distances);
    r.class_index = r.ranked.front();
    return r;
}

std::vector<double> bit_confidence(std::span<const double> probs) {
    std::vector<double> q(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) q[k] = std::max(probs[k], 1.0 - probs[k]);
    return q;
}

double pixel_confidence(std::span<const double> probs) {
    if (probs.empty()) return 0.5;
    double sum = 0.0;
    for (double p : probs) sum += std::max(p, 1.0 - p);
    return sum / static_cast<double>(probs.size());
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<double> sigmoid(std::span<const double> logits) {
    std::vector<double> p(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) p[k] = sigmoid(logits[k]);
    return p;
}

void check_probabilities(std::span<const double> probs) {
    for (std::size_t k = 0; k < probs.size(); ++k)
        if (!(probs[k] >= 0.0 && probs[k] <= 1.0))
            throw std::invalid_argument("probability " + std::to_string(k) + " outside [0, 1]");
}

}  // namespace ecoc
