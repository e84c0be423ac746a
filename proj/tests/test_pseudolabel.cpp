#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ecoc/codebook.hpp"
#include "ecoc/decoding.hpp"
#include "ecoc/pseudolabel.hpp"
#include "ecoc/random.hpp"

using namespace ecoc;

namespace {

std::vector<std::uint8_t> bits(const std::string& s) {
    std::vector<std::uint8_t> b;
    for (char c : s) b.push_back(c == '1');
    return b;
}

std::vector<double> random_probs(Rng& rng, std::size_t k) {
    std::vector<double> p(k);
    for (auto& v : p) v = rng.uniform();
    return p;
}

}  // namespace

TEST_CASE("bitwise_label") {
    CHECK(bitwise_label(std::vector<double>{0.9, 0.2, 0.6}).bits == bits("101"));
    CHECK(bitwise_label(std::vector<double>(4, 0.5)).bits == bits("1111"));
    const auto l = bitwise_label(std::vector<double>{1, 0, 0, 1});
    CHECK(l.bits == bits("1001"));
    CHECK(l.form == LabelForm::bitwise);
    CHECK_FALSE(l.mask.has_value());
    CHECK_FALSE(l.source_class.has_value());
}

TEST_CASE("codewise_label") {
    const auto l = codewise_label(one_hot(3), std::vector<double>{0.6, 0.55, 0.1});
    CHECK(l.bits == bits("100"));
    CHECK(l.source_class == std::optional<std::size_t>(0));
    CHECK(l.form == LabelForm::codewise);
    Rng rng(1);
    const auto cb = generate_mmd({6, 10, 300, 1, 1});
    for (int i = 0; i < 100; ++i) {
        const auto c = codewise_label(cb, random_probs(rng, 10));
        REQUIRE(c.source_class.has_value());
        CHECK(std::ranges::equal(c.bits, cb.row(*c.source_class)));
    }
}

TEST_CASE("shared and distinct parts") {
    const auto a = bits("110"), b = bits("100");
    std::vector<std::span<const std::uint8_t>> ab{a, b};
    CHECK(shared_part(ab) == bits("101"));
    CHECK(distinct_part(a, b) == bits("010"));
    std::vector<std::span<const std::uint8_t>> one{a};
    CHECK(shared_part(one) == bits("111"));
    const auto x = bits("1010"), y = bits("0101");
    std::vector<std::span<const std::uint8_t>> comp{x, y};
    CHECK(shared_part(comp) == bits("0000"));
    CHECK(distinct_part(x, y) == bits("1111"));
    CHECK(distinct_part(x, x) == bits("0000"));
    CHECK_THROWS_AS(shared_part(std::vector<std::span<const std::uint8_t>>{}), std::invalid_argument);
    CHECK_THROWS_AS(distinct_part(a, x), std::invalid_argument);
}

TEST_CASE("reliable bit mining") {
    const auto cb = generate_mmd({8, 16, 500, 3, 1});
    SUBCASE("exact codeword stops after one iteration with the full mask") {
        std::vector<double> p(cb.row(5).begin(), cb.row(5).end());
        MiningTrace trace;
        CHECK(mine_reliable_bits(cb, p, 0.95, &trace) == BitMask(16, 1));
        CHECK(trace.candidates == 1);
    }
    SUBCASE("T = 0.5 gives the code-wise label whenever confidence exceeds 0.5") {
        Rng rng(2);
        for (int i = 0; i < 500; ++i) {
            const auto p = random_probs(rng, 16);
            REQUIRE(pixel_confidence(p) > 0.5);
            CHECK(mine_reliable_bits(cb, p, 0.5) == BitMask(16, 1));
            CHECK(hybrid_label(cb, p, 0.5).bits == codewise_label(cb, p).bits);
        }
    }
    SUBCASE("T = 1 ends at the shared part of every row") {
        std::vector<std::size_t> all(8);
        for (std::size_t i = 0; i < 8; ++i) all[i] = i;
        const auto everything = shared_part(cb, all);
        CHECK(everything == BitMask(16, 0));
        Rng rng(3);
        for (int i = 0; i < 200; ++i) {
            const auto p = random_probs(rng, 16);
            CHECK(mine_reliable_bits(cb, p, 1.0) == everything);
            CHECK(hybrid_label(cb, p, 1.0).bits == bitwise_label(p).bits);
        }
    }
    SUBCASE("masks shrink monotonically and match the true class among the candidates") {
        Rng rng(4);
        for (int i = 0; i < 300; ++i) {
            const auto p = random_probs(rng, 16);
            MiningTrace trace;
            mine_reliable_bits(cb, p, 1.0, &trace);
            const auto ranked = decode(cb, p).ranked;
            for (std::size_t it = 0; it < trace.masks.size(); ++it) {
                if (it > 0)
                    for (std::size_t k = 0; k < 16; ++k) CHECK(trace.masks[it][k] <= trace.masks[it - 1][k]);
                // Any class among the first it+1 ranked agrees with every candidate on mask bits.
                for (std::size_t c = 0; c <= it; ++c)
                    for (std::size_t k = 0; k < 16; ++k)
                        if (trace.masks[it][k]) CHECK(cb.bit(ranked[c], k) == cb.bit(ranked[0], k));
            }
        }
    }
}

TEST_CASE("hybrid label") {
    SUBCASE("positional fusion example") {
        PseudoCode cw{bits("1100"), LabelForm::codewise, std::nullopt, 2};
        PseudoCode bw{bits("1010"), LabelForm::bitwise, std::nullopt, std::nullopt};
        const auto h = fuse_hybrid(cw, bw, bits("1001"));
        CHECK(h.bits == bits("1010"));
        CHECK(h.form == LabelForm::hybrid);
        CHECK(h.mask == std::optional<BitMask>(bits("1001")));
        CHECK(h.source_class == std::optional<std::size_t>(2));
        CHECK(fuse_hybrid(cw, bw, bits("1111")).bits == cw.bits);
        CHECK(fuse_hybrid(cw, bw, bits("0000")).bits == bw.bits);
    }
    SUBCASE("hybrid interpolates between the two forms") {
        Rng rng(5);
        const auto cb = generate_mmd({10, 20, 500, 6, 1});
        for (int i = 0; i < 500; ++i) {
            auto p = random_probs(rng, 20);
            const double T = rng.uniform(0.5, 1.0);
            const auto h = hybrid_label(cb, p, T);
            const auto cw = codewise_label(cb, p), bw = bitwise_label(p);
            REQUIRE(h.mask.has_value());
            CHECK(h.source_class == cw.source_class);
            for (std::size_t k = 0; k < 20; ++k) CHECK(h.bits[k] == ((*h.mask)[k] ? cw.bits[k] : bw.bits[k]));
        }
    }
    SUBCASE("every bit confident beyond T after one iteration gives the code-wise label") {
        const auto cb = generate_mmd({6, 12, 300, 7, 1});
        Rng rng(6);
        for (int i = 0; i < 100; ++i) {
            std::vector<double> p(12);
            const std::size_t c = rng.index(6);
            for (std::size_t k = 0; k < 12; ++k) p[k] = cb.bit(c, k) ? rng.uniform(0.96, 1.0) : rng.uniform(0.0, 0.04);
            CHECK(hybrid_label(cb, p, 0.95).bits == codewise_label(cb, p).bits);
        }
    }
}

TEST_CASE("label form names") {
    for (auto f : {LabelForm::bitwise, LabelForm::codewise, LabelForm::hybrid})
        CHECK(label_form_from_string(to_string(f)) == f);
    CHECK_THROWS(label_form_from_string("soft"));
}

TEST_CASE("quality estimates") {
    CHECK(image_quality_weight(std::vector<double>(5, 1.0), 0.95) == 1.0);
    CHECK(image_quality_weight(std::vector<double>(5, 0.5), 0.95) == 0.0);
    CHECK(image_quality_weight(std::vector<double>{0.99, 0.90, 0.97}, 0.95) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS(image_quality_weight(std::vector<double>{}, 0.95));
    Rng rng(7);
    std::vector<double> conf(200);
    for (auto& c : conf) c = rng.uniform(0.5, 1.0);
    double prev = 2.0;
    for (double t = 0.5; t <= 1.0; t += 0.01) {
        const double w = image_quality_weight(conf, t);
        CHECK(w <= prev);
        prev = w;
    }
    CHECK(threshold_filter(0.99, 0.95) == 1);
    CHECK(threshold_filter(0.95, 0.95) == 0);
    CHECK(threshold_filter(0.5, 0.95) == 0);
}
