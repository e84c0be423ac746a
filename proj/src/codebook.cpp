#include "ecoc/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ecoc/error.hpp"
#include "ecoc/random.hpp"

namespace ecoc {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::mmd: return "mmd";
        case Strategy::text: return "text";
        case Strategy::onehot: return "onehot";
        case Strategy::custom: return "custom";
    }
    return "custom";
}

Strategy strategy_from_string(std::string_view name) {
    if (name == "mmd") return Strategy::mmd;
    if (name == "text") return Strategy::text;
    if (name == "onehot") return Strategy::onehot;
    if (name == "custom") return Strategy::custom;
    throw std::invalid_argument("unknown codebook strategy '" + std::string(name) + "'");
}

Codebook::Codebook(std::size_t n_classes, std::size_t code_length, std::vector<std::uint8_t> bits,
                   Strategy s)
    : strategy(s), n_classes_(n_classes), code_length_(code_length), bits_(std::move(bits)) {
    if (n_classes_ < 2) throw std::invalid_argument("codebook needs at least 2 classes");
    if (code_length_ < 1) throw std::invalid_argument("codebook needs code_length >= 1");
    if (bits_.size() != n_classes_ * code_length_)
        throw std::invalid_argument("codebook bit count does not match n_classes x code_length");
    for (auto b : bits_)
        if (b > 1) throw std::invalid_argument("codebook entries must be 0 or 1");
}

Codebook Codebook::from_strings(const std::vector<std::string>& rows, Strategy s) {
    if (rows.empty()) throw std::invalid_argument("codebook has no rows");
    const std::size_t k = rows.front().size();
    std::vector<std::uint8_t> bits;
    bits.reserve(rows.size() * k);
    for (std::size_t n = 0; n < rows.size(); ++n) {
        if (rows[n].size() != k)
            throw std::invalid_argument("row " + std::to_string(n) + " has length " +
                                        std::to_string(rows[n].size()) + ", expected " + std::to_string(k));
        for (char c : rows[n]) {
            if (c != '0' && c != '1')
                throw std::invalid_argument("row " + std::to_string(n) + " contains a character other than 0/1");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
    }
    return Codebook(rows.size(), k, std::move(bits), s);
}

std::string Codebook::row_string(std::size_t n) const {
    std::string s(code_length_, '0');
    for (std::size_t k = 0; k < code_length_; ++k) s[k] = bit(n, k) ? '1' : '0';
    return s;
}

std::vector<std::string> Codebook::row_strings() const {
    std::vector<std::string> out;
    out.reserve(n_classes_);
    for (std::size_t n = 0; n < n_classes_; ++n) out.push_back(row_string(n));
    return out;
}

std::size_t hamming(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

namespace {

// Row-major bit matrix packed into 64-bit words, plus its transpose.
struct PackedMatrix {
    std::size_t n = 0, k = 0;
    std::size_t row_words = 0, col_words = 0;
    std::vector<std::uint64_t> rows;  // n * row_words
    std::vector<std::uint64_t> cols;  // k * col_words

    PackedMatrix(std::size_t n_, std::size_t k_)
        : n(n_), k(k_), row_words((k_ + 63) / 64), col_words((n_ + 63) / 64),
          rows(n_ * row_words), cols(k_ * col_words) {}

    std::uint64_t row_tail_mask() const {
        const std::size_t r = k % 64;
        return r == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
    }

    void transpose() {
        std::fill(cols.begin(), cols.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if ((rows[i * row_words + j / 64] >> (j % 64)) & 1u)
                    cols[j * col_words + i / 64] |= std::uint64_t{1} << (i % 64);
    }

    static std::size_t distance(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
        std::size_t d = 0;
        for (std::size_t w = 0; w < words; ++w) d += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
        return d;
    }

    static std::size_t weight(const std::uint64_t* a, std::size_t words) {
        std::size_t d = 0;
        for (std::size_t w = 0; w < words; ++w) d += static_cast<std::size_t>(std::popcount(a[w]));
        return d;
    }
};

PackedMatrix pack(const Codebook& cb) {
    PackedMatrix m(cb.n_classes(), cb.code_length());
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.k; ++j)
            if (cb.bit(i, j)) m.rows[i * m.row_words + j / 64] |= std::uint64_t{1} << (j % 64);
    m.transpose();
    return m;
}

struct RawStats {
    std::size_t d_min_row = 0;
    std::size_t d_sum_row = 0;  // over all pairs
    std::size_t d_min_col = 0;
    std::size_t d_max_col = 0;
    bool constant_column = false;
};

RawStats raw_stats(const PackedMatrix& m) {
    RawStats s;
    s.d_min_row = m.k;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i + 1; j < m.n; ++j) {
            const auto d = PackedMatrix::distance(&m.rows[i * m.row_words], &m.rows[j * m.row_words], m.row_words);
            s.d_min_row = std::min(s.d_min_row, d);
            s.d_sum_row += d;
        }
    if (m.k < 2) {
        s.d_min_col = 1;
        s.d_max_col = m.n - 1;
    } else {
        s.d_min_col = m.n;
        s.d_max_col = 0;
        for (std::size_t i = 0; i < m.k; ++i)
            for (std::size_t j = i + 1; j < m.k; ++j) {
                const auto d =
                    PackedMatrix::distance(&m.cols[i * m.col_words], &m.cols[j * m.col_words], m.col_words);
                s.d_min_col = std::min(s.d_min_col, d);
                s.d_max_col = std::max(s.d_max_col, d);
            }
    }
    for (std::size_t j = 0; j < m.k; ++j) {
        const auto w = PackedMatrix::weight(&m.cols[j * m.col_words], m.col_words);
        if (w == 0 || w == m.n) s.constant_column = true;
    }
    return s;
}

}  // namespace

SeparationStats separation_stats(const Codebook& cb) {
    const auto raw = raw_stats(pack(cb));
    SeparationStats s;
    s.d_min_row = raw.d_min_row;
    s.d_min_col = raw.d_min_col;
    s.d_max_col = raw.d_max_col;
    const std::size_t pairs = cb.n_classes() * (cb.n_classes() - 1) / 2;
    s.d_mean_row = static_cast<double>(raw.d_sum_row) / static_cast<double>(pairs);
    s.correctable_bits = s.d_min_row == 0 ? 0 : (s.d_min_row - 1) / 2;
    return s;
}

ValidityReport validate(const Codebook& cb) {
    ValidityReport report;
    const std::size_t n = cb.n_classes(), k = cb.code_length();

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (hamming(cb.row(i), cb.row(j)) == 0)
                report.violations.push_back("duplicate rows: " + std::to_string(i) + " and " + std::to_string(j));

    auto column_distance = [&](std::size_t a, std::size_t b) {
        std::size_t d = 0;
        for (std::size_t i = 0; i < n; ++i) d += cb.bit(i, a) != cb.bit(i, b);
        return d;
    };
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            const auto d = column_distance(a, b);
            if (d == 0)
                report.violations.push_back("identical columns: " + std::to_string(a) + " and " + std::to_string(b));
            // One-hot(2) has complementary columns by construction; the
            // column criteria are ECOC design rules, not baseline rules.
            else if (d == n && cb.strategy != Strategy::onehot)
                report.violations.push_back("complementary columns: " + std::to_string(a) + " and " +
                                            std::to_string(b));
        }
    for (std::size_t a = 0; a < k; ++a) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i) ones += cb.bit(i, a);
        if (ones == 0 || ones == n) report.violations.push_back("constant column: " + std::to_string(a));
    }

    if (cb.strategy == Strategy::onehot) {
        bool pattern = (k == n);
        for (std::size_t i = 0; pattern && i < n; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (cb.bit(i, j) != (i == j ? 1 : 0)) pattern = false;
        if (!pattern) report.violations.push_back("onehot strategy without identity pattern");
    }
    if (!cb.class_names.empty() && cb.class_names.size() != n)
        report.violations.push_back("class_names count " + std::to_string(cb.class_names.size()) +
                                    " does not match n_classes " + std::to_string(n));
    return report;
}

namespace {

void draw_candidate(PackedMatrix& m, std::uint64_t seed, std::uint64_t index) {
    Rng rng(seed, index);
    const auto tail = m.row_tail_mask();
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t w = 0; w < m.row_words; ++w) {
            auto word = rng.next_u64();
            if (w + 1 == m.row_words) word &= tail;
            m.rows[i * m.row_words + w] = word;
        }
    m.transpose();
}

struct Best {
    std::size_t score = 0;  // 0 means no valid candidate yet
    std::uint64_t index = 0;
};

Best search_range(const MmdOptions& o, std::uint64_t begin, std::uint64_t end) {
    PackedMatrix m(o.n_classes, o.code_length);
    Best best;
    for (std::uint64_t j = begin; j < end; ++j) {
        draw_candidate(m, o.seed, j);
        const auto s = raw_stats(m);
        if (s.d_min_row == 0 || s.d_min_col == 0 || s.d_max_col == o.n_classes || s.constant_column) continue;
        const std::size_t score = s.d_min_row + s.d_min_col + (o.n_classes - s.d_max_col);
        if (score > best.score) best = {score, j};
    }
    return best;
}

}  // namespace

Codebook generate_mmd(const MmdOptions& o) {
    if (o.n_classes < 2) throw std::invalid_argument("generate_mmd: n_classes must be >= 2");
    if (o.iterations < 1) throw std::invalid_argument("generate_mmd: iterations must be >= 1");
    const auto min_len = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(o.n_classes))));
    if (o.code_length < std::max<std::size_t>(1, min_len))
        throw std::invalid_argument("generate_mmd: code_length must be >= ceil(log2(n_classes)) = " +
                                    std::to_string(min_len));

    // Non-constant, pairwise non-complementary columns number 2^(N-1) - 1.
    if (o.n_classes <= 64 && o.code_length > (std::uint64_t{1} << (o.n_classes - 1)) - 1)
        throw ValidationError("generate_mmd: code_length " + std::to_string(o.code_length) + " exceeds the " +
                              std::to_string((std::uint64_t{1} << (o.n_classes - 1)) - 1) +
                              " distinct valid columns available for n_classes=" + std::to_string(o.n_classes));

    const unsigned threads = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(o.iterations)));
    std::vector<Best> partial(threads);
    if (threads == 1) {
        partial[0] = search_range(o, 0, o.iterations);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (o.iterations + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t b = std::min<std::uint64_t>(o.iterations, t * chunk);
            const std::uint64_t e = std::min<std::uint64_t>(o.iterations, b + chunk);
            pool.emplace_back([&, t, b, e] { partial[t] = search_range(o, b, e); });
        }
        for (auto& th : pool) th.join();
    }
    // Chunks are ordered, so the first strictly-better chunk wins ties.
    Best best;
    for (const auto& p : partial)
        if (p.score > best.score) best = p;
    if (best.score == 0)
        throw ValidationError("generate_mmd: no valid candidate among " + std::to_string(o.iterations) +
                              " draws for n_classes=" + std::to_string(o.n_classes) +
                              " code_length=" + std::to_string(o.code_length) + "; increase iterations or code_length");

    PackedMatrix m(o.n_classes, o.code_length);
    draw_candidate(m, o.seed, best.index);
    std::vector<std::uint8_t> bits(o.n_classes * o.code_length);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.k; ++j)
            bits[i * m.k + j] = static_cast<std::uint8_t>((m.rows[i * m.row_words + j / 64] >> (j % 64)) & 1u);
    Codebook cb(o.n_classes, o.code_length, std::move(bits), Strategy::mmd);
    cb.seed = o.seed;
    cb.iterations = o.iterations;
    cb.prng = kPrngName;
    return cb;
}

void check_embeddings(const EmbeddingTable& emb) {
    if (emb.names.size() != emb.vectors.size())
        throw std::invalid_argument("embedding table: names and vectors differ in count");
    if (emb.vectors.empty()) throw std::invalid_argument("embedding table is empty");
    const std::size_t c = emb.vectors.front().size();
    if (c == 0) throw std::invalid_argument("embedding table: dimension must be >= 1");
    for (std::size_t i = 0; i < emb.vectors.size(); ++i) {
        const auto& v = emb.vectors[i];
        if (v.size() != c)
            throw std::invalid_argument("embedding '" + emb.names[i] + "' has dimension " + std::to_string(v.size()) +
                                        ", expected " + std::to_string(c));
        double norm2 = 0.0;
        for (double x : v) {
            if (!std::isfinite(x)) throw std::invalid_argument("embedding '" + emb.names[i] + "' is not finite");
            norm2 += x * x;
        }
        if (norm2 == 0.0) throw std::invalid_argument("embedding '" + emb.names[i] + "' has zero norm");
    }
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open embedding file " + path.string());
    EmbeddingTable emb;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string name;
        if (!(ss >> name) || name.front() == '#') continue;
        std::vector<double> v;
        std::string tok;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": bad real '" + tok + "'");
            }
        }
        emb.names.push_back(std::move(name));
        emb.vectors.push_back(std::move(v));
    }
    try {
        check_embeddings(emb);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return emb;
}

EmbeddingTable select_embeddings(const EmbeddingTable& emb, const std::vector<std::string>& names) {
    EmbeddingTable out;
    for (const auto& name : names) {
        auto it = std::find(emb.names.begin(), emb.names.end(), name);
        if (it == emb.names.end()) throw ValidationError("no embedding for class '" + name + "'");
        out.names.push_back(name);
        out.vectors.push_back(emb.vectors[static_cast<std::size_t>(it - emb.names.begin())]);
    }
    return out;
}

Codebook generate_text(const EmbeddingTable& emb, std::size_t code_length) {
    check_embeddings(emb);
    const std::size_t n = emb.size(), c = emb.dimension();
    if (n < 2) throw std::invalid_argument("generate_text: need at least 2 classes");
    if (code_length < 1) throw std::invalid_argument("generate_text: code_length must be >= 1");

    std::vector<std::vector<double>> f(n, std::vector<double>(c));
    for (std::size_t i = 0; i < n; ++i) {
        double norm2 = 0.0;
        for (double x : emb.vectors[i]) norm2 += x * x;
        const double norm = std::sqrt(norm2);
        for (std::size_t j = 0; j < c; ++j) f[i][j] = emb.vectors[i][j] / norm;
    }

    std::vector<double> mean(c, 0.0), var(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t i = 0; i < n; ++i) mean[j] += f[i][j];
        mean[j] /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) var[j] += (f[i][j] - mean[j]) * (f[i][j] - mean[j]);
        var[j] /= static_cast<double>(n);
    }
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });

    std::vector<std::vector<std::uint8_t>> accepted;
    for (std::size_t dim : order) {
        if (accepted.size() == code_length) break;
        std::vector<std::uint8_t> col(n);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = f[i][dim] >= mean[dim] ? 1 : 0;
            ones += col[i];
        }
        if (ones == 0 || ones == n) continue;
        bool clash = false;
        for (const auto& prev : accepted) {
            const auto d = hamming(col, prev);
            if (d == 0 || d == n) {
                clash = true;
                break;
            }
        }
        if (!clash) accepted.push_back(std::move(col));
    }
    if (accepted.size() < code_length)
        throw ValidationError("generate_text: fewer than K valid columns (found " + std::to_string(accepted.size()) +
                              " of " + std::to_string(code_length) + " among " + std::to_string(c) + " dimensions)");

    std::vector<std::uint8_t> bits(n * code_length);
    for (std::size_t k = 0; k < code_length; ++k)
        for (std::size_t i = 0; i < n; ++i) bits[i * code_length + k] = accepted[k][i];
    Codebook cb(n, code_length, std::move(bits), Strategy::text);
    cb.class_names = emb.names;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (hamming(cb.row(i), cb.row(j)) == 0)
                throw ValidationError("generate_text: rows not distinct (classes '" + emb.names[i] + "' and '" +
                                      emb.names[j] + "')");
    return cb;
}

Codebook one_hot(std::size_t n_classes) {
    if (n_classes < 2) throw std::invalid_argument("one_hot: n_classes must be >= 2");
    std::vector<std::uint8_t> bits(n_classes * n_classes, 0);
    for (std::size_t i = 0; i < n_classes; ++i) bits[i * n_classes + i] = 1;
    return Codebook(n_classes, n_classes, std::move(bits), Strategy::onehot);
}

double theorem2_threshold(std::size_t code_length, std::size_t n_classes, double eps, double gamma,
                          double gamma_hat, double kappa) {
    if (!(gamma > 0.0)) throw std::domain_error("theorem2_threshold: gamma must be positive");
    if (!(kappa > 0.0)) throw std::domain_error("theorem2_threshold: kappa must be positive");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::domain_error("theorem2_threshold: eps must lie in [0, 1)");
    const double n = static_cast<double>(code_length);
    const double c = static_cast<double>(n_classes);
    const double g2 = gamma * gamma;
    return 16.0 * eps * kappa * kappa / g2 * ((1.0 + std::log(2.0)) * n / 2.0 - std::log(2.0 * c)) +
           2.0 * gamma_hat * gamma_hat / g2;
}

bool satisfies_theorem2(const Codebook& cb, double eps, double gamma, double gamma_hat, double kappa) {
    const double t = theorem2_threshold(cb.code_length(), cb.n_classes(), eps, gamma, gamma_hat, kappa);
    return static_cast<double>(separation_stats(cb).d_min_row) > t;
}

}  // namespace ecoc
