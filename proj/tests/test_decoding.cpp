#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ecoc/codebook.hpp"
#include "ecoc/decoding.hpp"
#include "ecoc/random.hpp"

using namespace ecoc;

namespace {

std::vector<double> random_probs(Rng& rng, std::size_t k) {
    std::vector<double> p(k);
    for (auto& v : p) v = rng.uniform();
    return p;
}

}  // namespace

TEST_CASE("soft_hamming") {
    const std::vector<std::uint8_t> c{1, 0, 1, 0};
    CHECK(soft_hamming(c, std::vector<double>{0.9, 0.1, 0.8, 0.2}) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(soft_hamming(c, std::vector<double>{1, 0, 1, 0}) == 0.0);
    CHECK(soft_hamming(c, std::vector<double>(4, 0.5)) == 0.5);
    CHECK_THROWS_AS(soft_hamming(c, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("soft_hamming of a codeword and its complement sums to 1") {
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        const std::size_t k = 1 + rng.index(40);
        std::vector<std::uint8_t> c(k), nc(k);
        for (std::size_t j = 0; j < k; ++j) {
            c[j] = static_cast<std::uint8_t>(rng.index(2));
            nc[j] = 1 - c[j];
        }
        const auto p = random_probs(rng, k);
        CHECK(soft_hamming(c, p) + soft_hamming(nc, p) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("decode") {
    SUBCASE("one_hot(3) example") {
        const auto r = decode(one_hot(3), std::vector<double>{0.75, 0.125, 0.125});
        CHECK(r.class_index == 0);
        CHECK(r.distances[0] == doctest::Approx(0.5 / 3));
        CHECK(r.distances[1] == doctest::Approx(1.75 / 3));
        CHECK(r.distances[2] == doctest::Approx(1.75 / 3));
        CHECK(r.ranked == std::vector<std::size_t>{0, 1, 2});
    }
    SUBCASE("exact codeword decodes with distance 0") {
        const auto cb = generate_mmd({6, 12, 300, 2, 1});
        std::vector<double> p(cb.row(3).begin(), cb.row(3).end());
        const auto r = decode(cb, p);
        CHECK(r.class_index == 3);
        CHECK(r.distances[3] == 0.0);
    }
    SUBCASE("all-0.5 ties go to the lowest index") {
        const auto r = decode(one_hot(5), std::vector<double>(5, 0.5));
        CHECK(r.class_index == 0);
        CHECK(r.ranked == std::vector<std::size_t>{0, 1, 2, 3, 4});
    }
    SUBCASE("length mismatch") { CHECK_THROWS_AS(decode(one_hot(3), std::vector<double>{0.5}), std::invalid_argument); }
    SUBCASE("distances in [0, 1], ranking consistent") {
        Rng rng(3);
        const auto cb = generate_mmd({8, 16, 300, 4, 1});
        for (int i = 0; i < 200; ++i) {
            const auto r = decode(cb, random_probs(rng, 16));
            CHECK(r.class_index == r.ranked[0]);
            for (std::size_t j = 0; j < 8; ++j) CHECK((r.distances[j] >= 0.0 && r.distances[j] <= 1.0));
            for (std::size_t j = 1; j < 8; ++j) {
                const double a = r.distances[r.ranked[j - 1]], b = r.distances[r.ranked[j]];
                CHECK((a < b || (a == b && r.ranked[j - 1] < r.ranked[j])));
            }
            CHECK(r.ranked == rank_classes(r.distances));
        }
    }
}

TEST_CASE("decode with one_hot reproduces argmax") {
    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 2 + rng.index(15);
        const auto p = random_probs(rng, n);
        const auto argmax = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        CHECK(decode(one_hot(n), p).class_index == argmax);
    }
}

TEST_CASE("moving toward the decoded codeword keeps the decision") {
    // Each distance becomes (1 - s) d + s H(c, c*), so the winner only gains.
    Rng rng(5);
    const auto cb = generate_mmd({8, 20, 500, 6, 1});
    for (int i = 0; i < 300; ++i) {
        auto p = random_probs(rng, 20);
        const auto r = decode(cb, p);
        const double s = rng.uniform();
        for (std::size_t k = 0; k < 20; ++k) p[k] += s * (cb.bit(r.class_index, k) - p[k]);
        CHECK(decode(cb, p).class_index == r.class_index);
    }
}

TEST_CASE("confidences") {
    const std::vector<double> p{0.9, 0.2};
    const auto q = bit_confidence(p);
    CHECK(q[0] == doctest::Approx(0.9));
    CHECK(q[1] == doctest::Approx(0.8));
    CHECK(pixel_confidence(p) == doctest::Approx(0.85));
    CHECK(bit_confidence(std::vector<double>{0.5})[0] == 0.5);
    CHECK(bit_confidence(std::vector<double>{0.0})[0] == 1.0);
    CHECK(pixel_confidence(std::vector<double>{1, 0, 0, 1}) == 1.0);
    CHECK(pixel_confidence(std::vector<double>(7, 0.5)) == 0.5);
}

TEST_CASE("sigmoid") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(2.0) == doctest::Approx(0.8807970779778823).epsilon(1e-15));
    for (double x : {-30.0, -3.0, -0.1, 0.7, 5.0, 40.0}) CHECK(sigmoid(-x) == doctest::Approx(1.0 - sigmoid(x)));
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(sigmoid(800.0) <= 1.0);
    const auto v = sigmoid(std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(v[0] < v[1]);
    CHECK(v[1] < v[2]);
}

TEST_CASE("check_probabilities") {
    CHECK_NOTHROW(check_probabilities(std::vector<double>{0.0, 1.0, 0.3}));
    CHECK_THROWS_AS(check_probabilities(std::vector<double>{1.1}), std::invalid_argument);
    CHECK_THROWS_AS(check_probabilities(std::vector<double>{NAN}), std::invalid_argument);
}
