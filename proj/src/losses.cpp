#include "ecoc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ecoc/decoding.hpp"

namespace ecoc {

namespace {

constexpr double kZeroNorm = 1e-12;

void check_lengths(std::size_t a, std::size_t b, const char* who) {
    if (a != b)
        throw std::invalid_argument(std::string(who) + ": length mismatch (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
}

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// cos(x, c) for a {0,1} codeword c read as {-1,+1}; all such vectors have
// norm sqrt(K).
double cosine_to_code(std::span<const double> x, double xnorm, std::span<const std::uint8_t> c) {
    double dot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) dot += c[k] ? x[k] : -x[k];
    return dot / (xnorm * std::sqrt(static_cast<double>(x.size())));
}

// grad += scale * d cos(x, c) / dx
void add_cosine_gradient(std::span<const double> x, double xnorm, std::span<const std::uint8_t> c, double cosv,
                         double scale, std::vector<double>& grad) {
    const double inv = 1.0 / (xnorm * std::sqrt(static_cast<double>(x.size())));
    const double inv2 = 1.0 / (xnorm * xnorm);
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double ck = c[k] ? 1.0 : -1.0;
        grad[k] += scale * (ck * inv - cosv * x[k] * inv2);
    }
}

bool same_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::vector<double> standardize(std::span<const std::uint8_t> bits) {
    std::vector<double> out(bits.size());
    for (std::size_t k = 0; k < bits.size(); ++k) out[k] = bits[k] ? 1.0 : -1.0;
    return out;
}

LossValue bce_loss(std::span<const double> logits, std::span<const std::uint8_t> target) {
    check_lengths(logits.size(), target.size(), "bce_loss");
    const double K = static_cast<double>(logits.size());
    LossValue out;
    out.gradient.resize(logits.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        const double p = sigmoid(logits[k]);
        const double pc = std::clamp(p, kProbClip, 1.0 - kProbClip);
        sum += target[k] ? std::log(pc) : std::log(1.0 - pc);
        out.gradient[k] = (p - static_cast<double>(target[k])) / K;
    }
    out.value = -sum / K;
    return out;
}

LossValue pcd_loss(std::span<const double> logits, std::span<const std::uint8_t> target) {
    check_lengths(logits.size(), target.size(), "pcd_loss");
    LossValue out;
    out.gradient.assign(logits.size(), 0.0);
    const double xnorm = norm(logits);
    if (xnorm < kZeroNorm) {
        out.value = 1.0;
        return out;
    }
    const double c = cosine_to_code(logits, xnorm, target);
    out.value = 1.0 - c;
    add_cosine_gradient(logits, xnorm, target, c, -1.0, out.gradient);
    return out;
}

LossValue pcc_loss(std::span<const double> logits, std::span<const std::uint8_t> target, const Codebook& cb,
                   double tau) {
    check_lengths(logits.size(), target.size(), "pcc_loss");
    check_lengths(logits.size(), cb.code_length(), "pcc_loss");
    if (!(tau > 0.0)) throw std::invalid_argument("pcc_loss: tau must be positive");

    std::vector<std::size_t> negatives;
    for (std::size_t n = 0; n < cb.n_classes(); ++n)
        if (!same_bits(cb.row(n), target)) negatives.push_back(n);

    LossValue out;
    out.gradient.assign(logits.size(), 0.0);
    const double xnorm = norm(logits);
    if (xnorm < kZeroNorm) {
        out.value = std::log1p(static_cast<double>(negatives.size()));
        return out;
    }

    // Index 0 is the target; 1.. are negatives.
    std::vector<double> cosines(negatives.size() + 1);
    cosines[0] = cosine_to_code(logits, xnorm, target);
    for (std::size_t j = 0; j < negatives.size(); ++j)
        cosines[j + 1] = cosine_to_code(logits, xnorm, cb.row(negatives[j]));

    double amax = -INFINITY;
    for (double c : cosines) amax = std::max(amax, c / tau);
    double z = 0.0;
    std::vector<double> w(cosines.size());
    for (std::size_t j = 0; j < cosines.size(); ++j) {
        w[j] = std::exp(cosines[j] / tau - amax);
        z += w[j];
    }
    out.value = std::log(z) + amax - cosines[0] / tau;

    for (std::size_t j = 0; j < cosines.size(); ++j) {
        const double coeff = (w[j] / z - (j == 0 ? 1.0 : 0.0)) / tau;
        const auto code = j == 0 ? target : cb.row(negatives[j - 1]);
        add_cosine_gradient(logits, xnorm, code, cosines[j], coeff, out.gradient);
    }
    return out;
}

double pcc_loss_pairwise(std::span<const double> logits, std::span<const std::uint8_t> target, const Codebook& cb,
                         double tau) {
    check_lengths(logits.size(), target.size(), "pcc_loss_pairwise");
    check_lengths(logits.size(), cb.code_length(), "pcc_loss_pairwise");
    if (!(tau > 0.0)) throw std::invalid_argument("pcc_loss_pairwise: tau must be positive");
    const double xnorm = norm(logits);
    const double scale = xnorm < kZeroNorm ? 0.0 : 1.0 / (xnorm * std::sqrt(static_cast<double>(logits.size())) * tau);

    std::vector<double> terms;
    for (std::size_t n = 0; n < cb.n_classes(); ++n) {
        const auto row = cb.row(n);
        if (same_bits(row, target)) continue;
        // c_neg - c_target is +-2 where the codes differ and 0 elsewhere.
        double dot = 0.0;
        for (std::size_t k = 0; k < logits.size(); ++k)
            if (row[k] != target[k]) dot += row[k] ? 2.0 * logits[k] : -2.0 * logits[k];
        terms.push_back(dot * scale);
    }
    double m = 0.0;
    for (double t : terms) m = std::max(m, t);
    double s = std::exp(-m);
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

LossValue total_loss(std::span<const double> logits, std::span<const std::uint8_t> target, const Codebook& cb,
                     const LossConfig& cfg) {
    auto out = bce_loss(logits, target);
    const auto d = pcd_loss(logits, target);
    const auto c = pcc_loss(logits, target, cb, cfg.tau);
    out.value += cfg.lambda1 * d.value + cfg.lambda2 * c.value;
    for (std::size_t k = 0; k < out.gradient.size(); ++k)
        out.gradient[k] += cfg.lambda1 * d.gradient[k] + cfg.lambda2 * c.gradient[k];
    return out;
}

std::vector<double> softmax(std::span<const double> scores) {
    std::vector<double> p(scores.size());
    if (scores.empty()) return p;
    const double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        p[i] = std::exp(scores[i] - m);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

LossValue ce_loss(std::span<const double> scores, std::size_t target_class) {
    if (target_class >= scores.size()) throw std::invalid_argument("ce_loss: target class out of range");
    const double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - m);
    LossValue out;
    out.value = std::log(z) + m - scores[target_class];
    out.gradient = softmax(scores);
    out.gradient[target_class] -= 1.0;
    return out;
}

double finite_diff_check(const LossFn& loss, std::span<const double> logits, double step) {
    if (!(step >= 1e-6 && step <= 1e-3)) throw std::invalid_argument("finite_diff_check: step must lie in [1e-6, 1e-3]");
    const auto analytic = loss(logits).gradient;
    if (analytic.size() != logits.size()) throw std::invalid_argument("finite_diff_check: gradient size mismatch");
    std::vector<double> x(logits.begin(), logits.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + step;
        const double fp = loss(x).value;
        x[i] = saved - step;
        const double fm = loss(x).value;
        x[i] = saved;
        const double numeric = (fp - fm) / (2.0 * step);
        worst = std::max(worst, std::abs(numeric - analytic[i]) / (std::abs(analytic[i]) + 1e-8));
    }
    return worst;
}

}  // namespace ecoc
