#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ecoc/codebook.hpp"
#include "ecoc/decoding.hpp"
#include "ecoc/metrics.hpp"
#include "ecoc/random.hpp"

using namespace ecoc;

TEST_CASE("ece examples") {
    SUBCASE("hand-binned three samples") {
        const std::vector<CalibSample> s{{0.75, true}, {0.75, false}, {0.95, true}};
        CHECK(std::abs(ece(s) - 0.18333333333333333) < 1e-9);
    }
    SUBCASE("confidence 1 and always correct") {
        const std::vector<CalibSample> s(20, {1.0, true});
        CHECK(ece(s) == 0.0);
    }
    SUBCASE("perfectly calibrated construction") {
        // Bin m holds 10 samples at confidence (m + 0.5) / 10 with that many correct.
        std::vector<CalibSample> s;
        for (int m = 0; m < 10; ++m)
            for (int i = 0; i < 20; ++i) s.push_back({(m + 0.5) / 10.0, i < 2 * m + 1});
        CHECK(ece(s) < 1e-12);
    }
    SUBCASE("empty input") { CHECK_THROWS(ece(std::vector<CalibSample>{})); }
}

TEST_CASE("bin edges") {
    CHECK(bin_index(0.0, 10) == 0);
    CHECK(bin_index(0.1, 10) == 1);
    CHECK(bin_index(0.0999, 10) == 0);
    CHECK(bin_index(0.95, 10) == 9);
    CHECK(bin_index(1.0, 10) == 9);
}

TEST_CASE("reliability bins agree with a direct recomputation") {
    Rng rng(1);
    std::vector<CalibSample> s(1000);
    for (auto& x : s) {
        x.confidence = rng.uniform(0.5, 1.0);
        x.correct = rng.bernoulli(x.confidence * 0.9);
    }
    const auto bins = reliability_bins(s, 10);
    CHECK(bins.bins.size() == 10);
    CHECK(bins.total == 1000);
    std::size_t count = 0;
    double direct = 0.0;
    for (std::size_t m = 0; m < 10; ++m) {
        const double lo = m / 10.0, hi = (m + 1) / 10.0;
        std::size_t n = 0, ok = 0;
        double conf = 0.0;
        for (const auto& x : s)
            if (x.confidence >= lo && (x.confidence < hi || (m == 9 && x.confidence <= 1.0))) {
                ++n;
                ok += x.correct;
                conf += x.confidence;
            }
        CHECK(bins.bins[m].count == n);
        count += bins.bins[m].count;
        if (n) {
            CHECK(bins.bins[m].mean_confidence == doctest::Approx(conf / n).epsilon(1e-12));
            CHECK(bins.bins[m].accuracy == doctest::Approx(double(ok) / n).epsilon(1e-12));
            direct += double(n) / 1000.0 * std::abs(double(ok) / n - conf / n);
        }
    }
    CHECK(count == 1000);
    CHECK(bins.bins[0].count == 0);
    CHECK(ece(s) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(ece(s) == ece_from_bins(bins));

    auto shuffled = s;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 337, shuffled.end());
    CHECK(std::abs(ece(shuffled) - ece(s)) < 1e-12);
}

TEST_CASE("bit_level_samples") {
    const auto cb = one_hot(3);
    SUBCASE("two pixels, K = 3") {
        const std::vector<double> p{0.9, 0.2, 0.4, 0.1, 0.7, 0.3};
        const std::vector<PseudoCode> t{{{1, 0, 0}, LabelForm::codewise, {}, 0}, {{0, 0, 1}, LabelForm::codewise, {}, 2}};
        const auto s = bit_level_samples(p, 3, t);
        REQUIRE(s.size() == 6);
        CHECK(s[0].confidence == doctest::Approx(0.9));
        CHECK(s[0].correct);
        CHECK(s[2].correct);
        CHECK(s[4].confidence == doctest::Approx(0.7));
        CHECK_FALSE(s[4].correct);
        CHECK_FALSE(s[5].correct);
    }
    SUBCASE("codeword-exact probabilities") {
        std::vector<double> p;
        std::vector<PseudoCode> t;
        for (std::size_t c = 0; c < 3; ++c) {
            p.insert(p.end(), cb.row(c).begin(), cb.row(c).end());
            t.push_back({{cb.row(c).begin(), cb.row(c).end()}, LabelForm::codewise, {}, c});
        }
        for (const auto& x : bit_level_samples(p, 3, t)) {
            CHECK(x.confidence == 1.0);
            CHECK(x.correct);
        }
    }
    SUBCASE("all 0.5") {
        const std::vector<double> p(6, 0.5);
        const std::vector<PseudoCode> t{{{1, 0, 0}, LabelForm::bitwise, {}, {}}, {{0, 1, 1}, LabelForm::bitwise, {}, {}}};
        for (const auto& x : bit_level_samples(p, 3, t)) CHECK(x.confidence == 0.5);
    }
    SUBCASE("misalignment") {
        const std::vector<double> p(5, 0.5);
        const std::vector<PseudoCode> t{{{1, 0, 0}, LabelForm::bitwise, {}, {}}};
        CHECK_THROWS(bit_level_samples(p, 3, t));
        CHECK_THROWS(bit_level_samples(std::vector<double>(6, 0.5), 3, t));
    }
}

TEST_CASE("topc_accuracy") {
    const auto cb = generate_mmd({6, 12, 300, 5, 1});
    Rng rng(2);
    std::vector<DecodeResult> results;
    std::vector<std::size_t> truth;
    for (int i = 0; i < 300; ++i) {
        std::vector<double> p(12);
        for (auto& v : p) v = rng.uniform();
        results.push_back(decode(cb, p));
        truth.push_back(rng.index(6));
    }
    const auto acc = topc_accuracy(results, truth, 6);
    REQUIRE(acc.size() == 6);
    for (std::size_t c = 1; c < 6; ++c) CHECK(acc[c] >= acc[c - 1]);
    CHECK(acc[5] == 1.0);
    // Brute force: position of the true class in a fresh sort of distances.
    for (std::size_t c = 1; c <= 6; ++c) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& d = results[i].distances;
            std::size_t better = 0;
            for (std::size_t j = 0; j < 6; ++j)
                better += d[j] < d[truth[i]] || (d[j] == d[truth[i]] && j < truth[i]);
            hits += better < c;
        }
        CHECK(acc[c - 1] == doctest::Approx(double(hits) / results.size()));
    }

    std::vector<DecodeResult> perfect;
    std::vector<std::size_t> labels;
    for (std::size_t c = 0; c < 6; ++c) {
        perfect.push_back(decode(cb, std::vector<double>(cb.row(c).begin(), cb.row(c).end())));
        labels.push_back(c);
    }
    for (double a : topc_accuracy(perfect, labels, 4)) CHECK(a == 1.0);
    CHECK_THROWS(topc_accuracy(perfect, labels, 7));
}
