#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ecoc/codebook.hpp"
#include "ecoc/decoding.hpp"
#include "ecoc/error.hpp"
#include "ecoc/random.hpp"

using namespace ecoc;

namespace {

// Brute-force oracle over the string form.
struct Brute {
    std::size_t d_min_row = 1000, d_min_col = 1000, d_max_col = 0;
};

Brute brute_stats(const std::vector<std::string>& rows) {
    Brute b;
    const std::size_t n = rows.size(), k = rows[0].size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t d = 0;
            for (std::size_t c = 0; c < k; ++c) d += rows[i][c] != rows[j][c];
            b.d_min_row = std::min(b.d_min_row, d);
        }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t c = a + 1; c < k; ++c) {
            std::size_t d = 0;
            for (std::size_t i = 0; i < n; ++i) d += rows[i][a] != rows[i][c];
            b.d_min_col = std::min(b.d_min_col, d);
            b.d_max_col = std::max(b.d_max_col, d);
        }
    return b;
}

bool has_violation(const ValidityReport& r, const std::string& needle) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "ecoc_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("one_hot codebooks") {
    const auto cb3 = one_hot(3);
    CHECK(cb3.row_strings() == std::vector<std::string>{"100", "010", "001"});
    CHECK(one_hot(2).row_strings() == std::vector<std::string>{"10", "01"});
    const auto s = separation_stats(cb3);
    CHECK(s.d_min_row == 2);
    CHECK(s.d_min_col == 2);
    CHECK(s.d_max_col == 2);
    CHECK(s.correctable_bits == 0);
    for (std::size_t n = 2; n <= 12; ++n) {
        CHECK(separation_stats(one_hot(n)).d_min_row == 2);
        CHECK(validate(one_hot(n)).ok());
    }
    CHECK_THROWS_AS(one_hot(1), std::invalid_argument);
}

TEST_CASE("separation stats of a degenerate 2x2 codebook") {
    const auto cb = Codebook::from_strings({"00", "11"});
    const auto s = separation_stats(cb);
    CHECK(s.d_min_row == 2);
    CHECK(s.d_min_col == 0);
    CHECK(has_violation(validate(cb), "identical columns"));
}

TEST_CASE("separation stats match a brute-force oracle") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(8), k = 2 + rng.index(20);
        std::vector<std::string> rows(n, std::string(k, '0'));
        for (auto& r : rows)
            for (auto& ch : r) ch = rng.bernoulli(0.5) ? '1' : '0';
        const auto s = separation_stats(Codebook::from_strings(rows));
        const auto b = brute_stats(rows);
        CHECK(s.d_min_row == b.d_min_row);
        CHECK(s.d_min_col == b.d_min_col);
        CHECK(s.d_max_col == b.d_max_col);
        CHECK(s.correctable_bits == (s.d_min_row == 0 ? 0 : (s.d_min_row - 1) / 2));
    }
}

TEST_CASE("validate reports each violated invariant") {
    SUBCASE("valid random 5x8 codebook found by rejection sampling") {
        Rng rng(5);
        for (;;) {
            std::vector<std::string> rows(5, std::string(8, '0'));
            for (auto& r : rows)
                for (auto& ch : r) ch = rng.bernoulli(0.5) ? '1' : '0';
            const auto b = brute_stats(rows);
            bool constant = false;
            for (std::size_t c = 0; c < 8; ++c) {
                std::size_t ones = 0;
                for (auto& r : rows) ones += r[c] == '1';
                constant |= ones == 0 || ones == 5;
            }
            if (b.d_min_row == 0 || b.d_min_col == 0 || b.d_max_col == 5 || constant) continue;
            CHECK(validate(Codebook::from_strings(rows)).ok());
            break;
        }
    }
    SUBCASE("duplicate rows") {
        CHECK(has_violation(validate(Codebook::from_strings({"0110", "0110", "1010"})), "duplicate rows"));
    }
    SUBCASE("constant column") {
        CHECK(validate(Codebook::from_strings({"011", "101", "110"})).ok());
        CHECK(has_violation(validate(Codebook::from_strings({"011", "101", "111"})), "constant column"));
    }
    SUBCASE("complementary columns") {
        CHECK(has_violation(validate(Codebook::from_strings({"01", "10", "01"})), "complementary columns"));
    }
    SUBCASE("onehot strategy must carry the identity pattern") {
        auto cb = Codebook::from_strings({"011", "101", "110"}, Strategy::onehot);
        CHECK(has_violation(validate(cb), "identity pattern"));
    }
    SUBCASE("class name count") {
        auto cb = one_hot(3);
        cb.class_names = {"a", "b"};
        CHECK(has_violation(validate(cb), "class_names"));
    }
}

TEST_CASE("codebook construction rejects malformed input") {
    CHECK_THROWS_AS(Codebook(1, 3, {0, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Codebook(2, 2, {0, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Codebook(2, 2, {0, 1, 2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Codebook::from_strings({"01", "1"}), std::invalid_argument);
    CHECK_THROWS_AS(Codebook::from_strings({"01", "1x"}), std::invalid_argument);
}

TEST_CASE("generate_mmd") {
    SUBCASE("N=2, K=1 has a single valid shape") {
        const auto cb = generate_mmd({2, 1, 100, 3, 1});
        auto rows = cb.row_strings();
        std::sort(rows.begin(), rows.end());
        CHECK(rows == std::vector<std::string>{"0", "1"});
        CHECK(separation_stats(cb).d_min_row == 1);
    }
    SUBCASE("pure function of (N, K, L, seed), independent of threads") {
        const auto a = generate_mmd({8, 16, 1000, 42, 1});
        const auto b = generate_mmd({8, 16, 1000, 42, 1});
        const auto c = generate_mmd({8, 16, 1000, 42, 3});
        CHECK(a == b);
        CHECK(a.bits() == c.bits());
        CHECK(a.bits() != generate_mmd({8, 16, 1000, 43, 1}).bits());
        CHECK(validate(a).ok());
        CHECK(a.strategy == Strategy::mmd);
        CHECK(a.seed == std::optional<std::uint64_t>(42));
        CHECK(a.iterations == std::optional<std::uint64_t>(1000));
        CHECK(a.prng == kPrngName);
    }
    SUBCASE("more candidates never lower the objective") {
        auto objective = [](const Codebook& cb) {
            const auto s = separation_stats(cb);
            return s.d_min_row + s.d_min_col + (cb.n_classes() - s.d_max_col);
        };
        // Candidate j depends only on (seed, j), so L2 > L1 searches a superset.
        CHECK(objective(generate_mmd({10, 20, 2000, 9, 1})) >= objective(generate_mmd({10, 20, 200, 9, 1})));
    }
    SUBCASE("generated codebooks are valid") {
        for (std::size_t n : {6u, 8u, 12u}) CHECK(validate(generate_mmd({n, 12, 500, n, 1})).ok());
    }
    SUBCASE("preconditions and failure") {
        CHECK_THROWS_AS(generate_mmd({8, 2, 10, 1, 1}), std::invalid_argument);
        CHECK_THROWS_AS(generate_mmd({4, 8, 0, 1, 1}), std::invalid_argument);
        // N = 3 admits at most 3 pairwise non-complementary non-constant columns.
        CHECK_THROWS_AS(generate_mmd({3, 4, 200, 1, 1}), ValidationError);
        // N = 4 has only 7 usable columns.
        CHECK_THROWS_AS(generate_mmd({4, 8, 100000, 1, 1}), ValidationError);
    }
}

TEST_CASE("generate_text") {
    SUBCASE("two orthogonal classes, K=1") {
        EmbeddingTable emb{{"a", "b"}, {{1.0, 0.0}, {0.0, 1.0}}};
        const auto cb = generate_text(emb, 1);
        // Equal variances: dimension 0 comes first; a is above the mean.
        CHECK(cb.row_strings() == std::vector<std::string>{"1", "0"});
        CHECK(cb.strategy == Strategy::text);
        CHECK(cb.class_names == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("identical vectors give only constant columns") {
        EmbeddingTable emb{{"a", "b", "c"}, {{1, 2, 3}, {1, 2, 3}, {1, 2, 3}}};
        try {
            generate_text(emb, 2);
            FAIL("expected an error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("fewer than K valid columns") != std::string::npos);
        }
    }
    SUBCASE("rows scaled by a positive factor give the same code") {
        EmbeddingTable a{{"x", "y", "z"}, {{1, 0, 2}, {0, 3, 1}, {2, 2, 0}}};
        EmbeddingTable b = a;
        for (auto& v : b.vectors[1]) v *= 7.0;
        CHECK(generate_text(a, 2).bits() == generate_text(b, 2).bits());
    }
    SUBCASE("bundled toy embeddings") {
        const auto emb = load_embeddings(ECOC_TEST_DATA "/toy_embeddings.txt");
        REQUIRE(emb.size() == 6);
        CHECK(emb.dimension() == 12);
        const auto cb = generate_text(emb, 6);
        CHECK(validate(cb).ok());
        CHECK(cb == generate_text(emb, 6));
        const auto sub = select_embeddings(emb, {"sky", "road", "car"});
        CHECK(sub.names == std::vector<std::string>{"sky", "road", "car"});
        CHECK_THROWS_AS(select_embeddings(emb, {"train"}), ValidationError);
    }
    SUBCASE("embedding checks") {
        CHECK_THROWS_AS(check_embeddings({{"a", "b"}, {{1, 0}, {1}}}), std::invalid_argument);
        CHECK_THROWS_AS(check_embeddings({{"a", "b"}, {{1, 0}, {0, 0}}}), std::invalid_argument);
    }
}

TEST_CASE("theorem2_threshold") {
    const double ln2 = std::log(2.0);
    CHECK(theorem2_threshold(40, 19, 0.0, 1.0, 1.0, 1.0) == 2.0);
    CHECK(theorem2_threshold(40, 19, 0.0, 2.0, 1.0, 3.0) == 0.5);
    CHECK(theorem2_threshold(40, 19, 1e-12, 1.0, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
    // 1.6 * ((1 + ln 2) * 20 - ln 38) + 2
    CHECK(theorem2_threshold(40, 19, 0.1, 1.0, 1.0, 1.0) == doctest::Approx(50.36057192235604).epsilon(1e-12));
    double prev = -1.0;
    for (double eps = 0.0; eps < 0.95; eps += 0.05) {
        const double t = theorem2_threshold(40, 19, eps, 1.0, 1.0, 1.0);
        CHECK(t > prev);
        prev = t;
    }
    CHECK((1 + ln2) * 20 > std::log(38.0));
    CHECK_THROWS_AS(theorem2_threshold(40, 19, 0.1, 0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(theorem2_threshold(40, 19, 0.1, 1.0, 1.0, -1.0), std::domain_error);
    // one_hot(3): d_min_row = 2, not strictly above the noise-free threshold 2.
    CHECK_FALSE(satisfies_theorem2(one_hot(3), 0.0, 1.0, 1.0, 1.0));
    CHECK(satisfies_theorem2(one_hot(3), 0.0, 1.0, 0.5, 1.0));
}

TEST_CASE("error correction up to floor((d_min_row - 1) / 2) flips") {
    const auto cb = generate_mmd({8, 24, 2000, 11, 1});
    const auto t = separation_stats(cb).correctable_bits;
    REQUIRE(t >= 1);
    Rng rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t cls = rng.index(8);
        std::vector<double> p(cb.row(cls).begin(), cb.row(cls).end());
        const std::size_t flips = rng.index(t + 1);
        std::vector<std::size_t> pos(24);
        for (std::size_t i = 0; i < 24; ++i) pos[i] = i;
        for (std::size_t i = 0; i < flips; ++i) std::swap(pos[i], pos[i + rng.index(24 - i)]);
        for (std::size_t i = 0; i < flips; ++i) p[pos[i]] = 1.0 - p[pos[i]];
        CHECK(decode(cb, p).class_index == cls);
    }
}

TEST_CASE("save and load") {
    SUBCASE("one_hot(3) round trip") {
        const auto cb = one_hot(3);
        const auto path = temp_file("onehot3.json");
        save(cb, path);
        const auto loaded = load(path);
        CHECK(loaded.codebook == cb);
        CHECK(loaded.report.ok());
    }
    SUBCASE("mmd round trip keeps provenance") {
        auto cb = generate_mmd({8, 12, 300, 77, 1});
        cb.class_names = {"a", "b", "c", "d", "e"};
        const auto back = from_json_string(to_json_string(cb, {"ecoc codebook-gen", 77}));
        CHECK(back.codebook == cb);
        CHECK(back.codebook.seed == std::optional<std::uint64_t>(77));
        CHECK(back.codebook.iterations == std::optional<std::uint64_t>(300));
    }
    SUBCASE("serialization is byte-stable") {
        const auto cb = generate_mmd({8, 12, 300, 77, 1});
        CHECK(to_json_string(cb) == to_json_string(from_json_string(to_json_string(cb)).codebook));
    }
    SUBCASE("duplicated row surfaces in the report") {
        const std::string text =
            R"({"n_classes":3,"code_length":3,"rows":["011","011","101"],"strategy":"custom"})";
        const auto loaded = from_json_string(text);
        CHECK(has_violation(loaded.report, "duplicate rows"));
    }
    SUBCASE("stale stored stats are reported") {
        const std::string text = R"({"n_classes":3,"code_length":3,"rows":["100","010","001"],)"
                                 R"("strategy":"onehot","stats":{"d_min_row":3,"d_min_col":2,"d_max_col":2}})";
        CHECK_FALSE(from_json_string(text).report.ok());
    }
    SUBCASE("malformed files throw") {
        CHECK_THROWS_AS(from_json_string("{not json"), ValidationError);
        CHECK_THROWS_AS(from_json_string(R"({"n_classes":3,"code_length":3,"rows":["100","010"]})"), ValidationError);
        CHECK_THROWS_AS(from_json_string(R"({"n_classes":2,"code_length":3,"rows":["100","01"]})"), ValidationError);
        CHECK_THROWS_AS(load(temp_file("does_not_exist.json")), ValidationError);
    }
}
