#include "ecoc/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ecoc/decoding.hpp"
#include "ecoc/losses.hpp"
#include "ecoc/random.hpp"
#include "ecoc/simulator.hpp"

namespace ecoc {

namespace {

constexpr double kGradientLimit = 1e-4;
constexpr double kIdentityLimit = 1e-9;

std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    return bits;
}

std::vector<double> random_logits(Rng& rng, std::size_t n) {
    const double scale = rng.uniform(0.5, 3.0);
    std::vector<double> x(n);
    for (auto& v : x) v = scale * rng.normal();
    return x;
}

Codebook random_codebook(Rng& rng, std::size_t n, std::size_t k) { return Codebook(n, k, random_bits(rng, n * k)); }

// Half of the targets are codebook rows, the rest arbitrary bit strings.
std::vector<std::uint8_t> random_target(Rng& rng, const Codebook& cb) {
    if (rng.bernoulli(0.5)) {
        auto row = cb.row(rng.index(cb.n_classes()));
        return {row.begin(), row.end()};
    }
    return random_bits(rng, cb.code_length());
}

std::string format(double x) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << x;
    return ss.str();
}

}  // namespace

SuiteResult gradient_suite(const std::string& loss, const SelftestOptions& opts) {
    static const std::vector<std::string> names{"bce", "pcd", "pcc", "total", "ce"};
    const auto it = std::find(names.begin(), names.end(), loss);
    if (it == names.end()) throw std::invalid_argument("unknown loss '" + loss + "'");
    Rng rng(opts.seed, 11 + static_cast<std::uint64_t>(it - names.begin()));

    SuiteResult r{"gradient_" + loss, true, 0.0, kGradientLimit, {}};
    for (std::size_t point = 0; point < opts.gradient_points; ++point) {
        LossFn fn;
        std::vector<double> x;
        if (loss == "ce") {
            const std::size_t n = 2 + rng.index(18);
            const std::size_t target = rng.index(n);
            x = random_logits(rng, n);
            fn = [target](std::span<const double> s) { return ce_loss(s, target); };
        } else {
            const std::size_t n = 2 + rng.index(9);
            const std::size_t k = 2 + rng.index(31);
            Codebook cb = random_codebook(rng, n, k);
            auto target = random_target(rng, cb);
            const double tau = rng.uniform(0.1, 2.0);
            x = random_logits(rng, k);
            if (loss == "bce") {
                fn = [target](std::span<const double> s) { return bce_loss(s, target); };
            } else if (loss == "pcd") {
                fn = [target](std::span<const double> s) { return pcd_loss(s, target); };
            } else if (loss == "pcc") {
                fn = [target, cb, tau](std::span<const double> s) { return pcc_loss(s, target, cb, tau); };
            } else {
                const LossConfig cfg{5.0, 2.0, tau};
                fn = [target, cb, cfg](std::span<const double> s) { return total_loss(s, target, cb, cfg); };
            }
        }
        if (opts.inject_gradient_bug) {
            fn = [inner = std::move(fn)](std::span<const double> s) {
                LossValue v = inner(s);
                for (auto& g : v.gradient) g *= 1.001;
                return v;
            };
        }
        const double err = finite_diff_check(fn, x);
        if (!(err <= r.statistic)) r.statistic = std::isnan(err) ? INFINITY : err;
    }
    r.passed = r.statistic < r.limit;
    r.detail = "max relative error " + format(r.statistic) + " over " + std::to_string(opts.gradient_points) +
               " points";
    return r;
}

SuiteResult pcc_identity_suite(const SelftestOptions& opts) {
    Rng rng(opts.seed, 21);
    SuiteResult r{"pcc_pairwise_identity", true, 0.0, kIdentityLimit, {}};
    std::size_t off_codebook = 0;
    for (std::size_t i = 0; i < opts.identity_instances; ++i) {
        const std::size_t n = 2 + rng.index(19);
        const std::size_t k = 2 + rng.index(63);
        Codebook cb = random_codebook(rng, n, k);
        auto target = random_target(rng, cb);
        bool in_book = false;
        for (std::size_t c = 0; c < n && !in_book; ++c) in_book = std::ranges::equal(cb.row(c), target);
        off_codebook += in_book ? 0 : 1;
        const double tau = rng.uniform(0.05, 2.0);
        auto x = random_logits(rng, k);
        const double a = pcc_loss(x, target, cb, tau).value;
        const double b = pcc_loss_pairwise(x, target, cb, tau);
        const double diff = std::abs(a - b);
        if (!(diff <= r.statistic)) r.statistic = std::isnan(diff) ? INFINITY : diff;
    }
    r.passed = r.statistic < r.limit;
    r.detail = "max |softmax - pairwise| " + format(r.statistic) + " over " + std::to_string(opts.identity_instances) +
               " instances (" + std::to_string(off_codebook) + " off-codebook targets)";
    return r;
}

SuiteResult error_correction_suite(const SelftestOptions& opts) {
    Rng rng(opts.seed, 31);
    SuiteResult r{"error_correction", true, 0.0, 0.0, {}};
    std::size_t failures = 0;
    std::size_t total_flips = 0;
    for (std::size_t trial = 0; trial < opts.correction_trials; ++trial) {
        const std::size_t n = 3 + rng.index(14);
        const std::size_t k = 12 + rng.index(29);
        // Raw random codes; only distinct rows matter for decoding.
        Codebook cb = random_codebook(rng, n, k);
        while (separation_stats(cb).d_min_row == 0) cb = random_codebook(rng, n, k);
        const std::size_t t = (separation_stats(cb).d_min_row - 1) / 2;
        const std::size_t cls = rng.index(n);
        const std::size_t flips = rng.index(t + 1);

        // Partial Fisher-Yates picks the flip set.
        std::vector<std::size_t> pos(k);
        for (std::size_t i = 0; i < k; ++i) pos[i] = i;
        for (std::size_t i = 0; i < flips; ++i) std::swap(pos[i], pos[i + rng.index(k - i)]);
        std::vector<double> probs(k);
        for (std::size_t i = 0; i < k; ++i) probs[i] = cb.bit(cls, i);
        for (std::size_t i = 0; i < flips; ++i) probs[pos[i]] = 1.0 - probs[pos[i]];
        total_flips += flips;
        if (decode(cb, probs).class_index != cls) ++failures;
    }
    r.statistic = static_cast<double>(failures);
    r.passed = failures == 0;
    r.detail = std::to_string(opts.correction_trials - failures) + "/" + std::to_string(opts.correction_trials) +
               " recovered, " + std::to_string(total_flips) + " bits flipped in total";
    return r;
}

SuiteResult bit_noise_suite(const std::string& name, const Codebook& cb, const SelftestOptions& opts) {
    const std::size_t n = cb.n_classes();
    const std::size_t k = cb.code_length();
    const std::size_t m = opts.noise_labels;
    std::vector<std::size_t> labels(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = i % n;
    std::vector<double> prior(n, 0.0);
    for (auto c : labels) prior[c] += 1.0 / static_cast<double>(m);

    const auto noisy = inject_uniform_label_noise(labels, n, opts.noise_eps, opts.seed);
    const auto expected = exact_bit_noise(cb, prior, opts.noise_eps);

    SuiteResult r{"bit_noise_" + name, true, 0.0, 3.0, {}};
    for (std::size_t b = 0; b < k; ++b) {
        std::size_t flips = 0;
        for (std::size_t i = 0; i < m; ++i) flips += cb.bit(labels[i], b) != cb.bit(noisy[i], b);
        const double p = expected.per_bit[b];
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(m));
        const double emp = static_cast<double>(flips) / static_cast<double>(m);
        const double z = sigma > 0.0 ? std::abs(emp - p) / sigma : (emp == p ? 0.0 : INFINITY);
        r.statistic = std::max(r.statistic, z);
    }
    r.passed = r.statistic <= r.limit;
    r.detail = "max |z| " + format(r.statistic) + " over " + std::to_string(k) + " bits, " + std::to_string(m) +
               " labels, eps " + format(opts.noise_eps);
    return r;
}

std::vector<std::pair<std::string, Codebook>> bit_noise_codebooks(std::uint64_t seed) {
    return {{"onehot8", one_hot(8)},
            {"mmd8x32", generate_mmd({8, 32, 10000, seed, 1})},
            {"complementary2", Codebook::from_strings({"0110", "1001"})}};
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts) {
    std::vector<SuiteResult> out;
    for (const char* loss : {"bce", "pcd", "pcc", "total", "ce"}) out.push_back(gradient_suite(loss, opts));
    out.push_back(pcc_identity_suite(opts));
    out.push_back(error_correction_suite(opts));
    for (const auto& [name, cb] : bit_noise_codebooks(opts.seed)) out.push_back(bit_noise_suite(name, cb, opts));
    return out;
}

}  // namespace ecoc
