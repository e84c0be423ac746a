#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ecoc/codebook.hpp"

namespace ecoc {

struct LossValue {
    double value = 0.0;
    std::vector<double> gradient;  // d value / d logit
};

struct LossConfig {
    double lambda1 = 5.0;  // pixel-code distance weight
    double lambda2 = 2.0;  // pixel-code contrast weight
    double tau = 0.5;      // contrast temperature
};

// {0,1} -> {-1,+1}
std::vector<double> standardize(std::span<const std::uint8_t> bits);

// Mean binary cross-entropy on sigmoid(logits). Log arguments are clamped to
// [kProbClip, 1 - kProbClip]; the gradient uses the unclamped sigmoid.
LossValue bce_loss(std::span<const double> logits, std::span<const std::uint8_t> target);

// 1 - cos(logits, standardized target). Zero-norm logits give value 1 and a
// zero gradient.
LossValue pcd_loss(std::span<const double> logits, std::span<const std::uint8_t> target);

// Softmax contrast of the target codeword against every codebook row that is
// not bit-identical to it, with cosine similarity over temperature tau.
LossValue pcc_loss(std::span<const double> logits, std::span<const std::uint8_t> target, const Codebook& cb,
                   double tau);

// Same quantity evaluated as log(1 + sum exp(<p, c_neg - c_target>/tau)),
// where the inner product only sees the positions the two codes disagree on.
// Value only; independent route used to cross-check pcc_loss.
double pcc_loss_pairwise(std::span<const double> logits, std::span<const std::uint8_t> target, const Codebook& cb,
                         double tau);

// bce + lambda1 * pcd + lambda2 * pcc
LossValue total_loss(std::span<const double> logits, std::span<const std::uint8_t> target, const Codebook& cb,
                     const LossConfig& cfg);

// Softmax cross-entropy for the one-hot baseline; gradient = softmax - onehot.
LossValue ce_loss(std::span<const double> scores, std::size_t target_class);

std::vector<double> softmax(std::span<const double> scores);

using LossFn = std::function<LossValue(std::span<const double>)>;

// Central differences per coordinate against the analytic gradient; returns
// max_i |numeric_i - analytic_i| / (|analytic_i| + 1e-8).
double finite_diff_check(const LossFn& loss, std::span<const double> logits, double step = 1e-5);

}  // namespace ecoc
