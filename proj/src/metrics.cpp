#include "ecoc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ecoc {

std::vector<CalibSample> bit_level_samples(std::span<const double> probs, std::size_t code_length,
                                           std::span<const PseudoCode> targets) {
    if (code_length == 0) throw std::invalid_argument("bit_level_samples: code_length must be positive");
    if (probs.size() != targets.size() * code_length)
        throw std::invalid_argument("bit_level_samples: " + std::to_string(probs.size()) +
                                    " probabilities do not align with " + std::to_string(targets.size()) +
                                    " targets of length " + std::to_string(code_length));
    std::vector<CalibSample> out;
    out.reserve(probs.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].bits.size() != code_length)
            throw std::invalid_argument("bit_level_samples: target " + std::to_string(i) + " has wrong length");
        for (std::size_t k = 0; k < code_length; ++k) {
            const double p = probs[i * code_length + k];
            const std::uint8_t predicted = p >= 0.5 ? 1 : 0;
            out.push_back({std::max(p, 1.0 - p), predicted == targets[i].bits[k]});
        }
    }
    return out;
}

std::size_t bin_index(double confidence, std::size_t n_bins) {
    if (!(confidence >= 0.0 && confidence <= 1.0))
        throw std::invalid_argument("confidence outside [0, 1]");
    const auto b = static_cast<std::size_t>(std::floor(confidence * static_cast<double>(n_bins)));
    return std::min(b, n_bins - 1);
}

ReliabilityBins reliability_bins(std::span<const CalibSample> samples, std::size_t n_bins) {
    if (n_bins == 0) throw std::invalid_argument("reliability_bins: n_bins must be positive");
    ReliabilityBins out;
    out.bins.resize(n_bins);
    std::vector<double> conf_sum(n_bins, 0.0);
    std::vector<std::size_t> correct(n_bins, 0);
    for (const auto& s : samples) {
        const auto b = bin_index(s.confidence, n_bins);
        ++out.bins[b].count;
        conf_sum[b] += s.confidence;
        correct[b] += s.correct;
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
        auto& bin = out.bins[b];
        bin.lower = static_cast<double>(b) / static_cast<double>(n_bins);
        bin.upper = static_cast<double>(b + 1) / static_cast<double>(n_bins);
        if (bin.count) {
            bin.mean_confidence = conf_sum[b] / static_cast<double>(bin.count);
            bin.accuracy = static_cast<double>(correct[b]) / static_cast<double>(bin.count);
        }
    }
    out.total = samples.size();
    return out;
}

double ece_from_bins(const ReliabilityBins& bins) {
    if (bins.total == 0) throw std::invalid_argument("ece: no samples");
    double e = 0.0;
    for (const auto& b : bins.bins)
        if (b.count)
            e += static_cast<double>(b.count) / static_cast<double>(bins.total) *
                 std::abs(b.accuracy - b.mean_confidence);
    return e;
}

double ece(std::span<const CalibSample> samples, std::size_t n_bins) {
    if (samples.empty()) throw std::invalid_argument("ece: no samples");
    return ece_from_bins(reliability_bins(samples, n_bins));
}

std::vector<double> topc_accuracy(std::span<const DecodeResult> results, std::span<const std::size_t> truth,
                                  std::size_t c_max) {
    if (results.size() != truth.size()) throw std::invalid_argument("topc_accuracy: misaligned inputs");
    if (results.empty()) throw std::invalid_argument("topc_accuracy: no pixels");
    if (c_max == 0 || c_max > results.front().ranked.size())
        throw std::invalid_argument("topc_accuracy: C_max must lie in [1, N]");
    std::vector<std::size_t> hits(c_max, 0);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& ranked = results[i].ranked;
        const auto it = std::find(ranked.begin(), ranked.end(), truth[i]);
        if (it == ranked.end()) throw std::invalid_argument("topc_accuracy: true class not in ranking");
        const auto pos = static_cast<std::size_t>(it - ranked.begin());
        for (std::size_t c = pos; c < c_max; ++c) ++hits[c];
    }
    std::vector<double> out(c_max);
    for (std::size_t c = 0; c < c_max; ++c)
        out[c] = static_cast<double>(hits[c]) / static_cast<double>(results.size());
    return out;
}

}  // namespace ecoc
