#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecoc {

enum class Strategy { mmd, text, onehot, custom };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

// N x K binary matrix, one K-bit codeword per class. Bit k of class n is
// character k of row n in the string form. Construction checks shape only;
// use validate() for the separation invariants.
class Codebook {
public:
    Codebook(std::size_t n_classes, std::size_t code_length, std::vector<std::uint8_t> bits,
             Strategy strategy = Strategy::custom);

    static Codebook from_strings(const std::vector<std::string>& rows, Strategy strategy = Strategy::custom);

    std::size_t n_classes() const { return n_classes_; }
    std::size_t code_length() const { return code_length_; }

    std::span<const std::uint8_t> row(std::size_t n) const {
        return {bits_.data() + n * code_length_, code_length_};
    }
    std::uint8_t bit(std::size_t n, std::size_t k) const { return bits_[n * code_length_ + k]; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    std::string row_string(std::size_t n) const;
    std::vector<std::string> row_strings() const;

    // Provenance.
    Strategy strategy = Strategy::custom;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> iterations;
    std::string prng;
    std::vector<std::string> class_names;  // empty or exactly n_classes entries

    bool operator==(const Codebook&) const = default;

private:
    std::size_t n_classes_;
    std::size_t code_length_;
    std::vector<std::uint8_t> bits_;
};

struct SeparationStats {
    std::size_t d_min_row = 0;
    std::size_t d_min_col = 0;
    std::size_t d_max_col = 0;
    double d_mean_row = 0.0;
    std::size_t correctable_bits = 0;  // floor((d_min_row - 1) / 2)
};

// Exact Hamming statistics over all row pairs and all column pairs. With a
// single column there are no column pairs; d_min_col = 1 and
// d_max_col = N - 1 are reported so that the column criteria hold vacuously.
SeparationStats separation_stats(const Codebook& cb);

struct ValidityReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Never throws for a constructed Codebook; lists every failed invariant.
ValidityReport validate(const Codebook& cb);

struct MmdOptions {
    std::size_t n_classes = 0;
    std::size_t code_length = 0;
    std::uint64_t iterations = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 1;  // output does not depend on this
};

// Max-min distance random search: keeps the first valid candidate with the
// largest d_min_row + d_min_col + (N - d_max_col). Candidate j draws its bits
// from Rng(seed, j). Throws ValidationError when every candidate is invalid.
Codebook generate_mmd(const MmdOptions& opts);

struct EmbeddingTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> vectors;

    std::size_t size() const { return names.size(); }
    std::size_t dimension() const { return vectors.empty() ? 0 : vectors.front().size(); }
};

// Throws std::invalid_argument when dimensions disagree, C == 0 or a vector
// has zero norm.
void check_embeddings(const EmbeddingTable& emb);

// One record per line: name followed by C reals. Blank lines and lines
// starting with '#' are skipped.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// Keeps only the named entries, in the given order.
EmbeddingTable select_embeddings(const EmbeddingTable& emb, const std::vector<std::string>& names);

// Text-embedding quantization: rows are L2-normalized, dimensions are visited
// by descending variance (ties by index), each dimension thresholded at its
// class mean (>= mean -> 1). Columns that are constant or duplicate/complement
// an accepted column are skipped.
Codebook generate_text(const EmbeddingTable& emb, std::size_t code_length);

Codebook one_hot(std::size_t n_classes);

// Minimum-distance condition for ECOC to admit a tighter noisy-label error
// bound than one-hot:
//   (16 eps kappa^2 / gamma^2) ((1 + ln 2) n / 2 - ln(2C)) + 2 gamma_hat^2 / gamma^2
// A codebook satisfies it when d_min_row is strictly larger.
double theorem2_threshold(std::size_t code_length, std::size_t n_classes, double eps, double gamma,
                          double gamma_hat, double kappa);

bool satisfies_theorem2(const Codebook& cb, double eps, double gamma, double gamma_hat, double kappa);

std::size_t hamming(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Optional metadata written alongside the codebook.
struct FileHeader {
    std::string command;
    std::optional<std::uint64_t> seed;
};

void save(const Codebook& cb, const std::filesystem::path& path, const FileHeader& header = {});
std::string to_json_string(const Codebook& cb, const FileHeader& header = {});

struct LoadedCodebook {
    Codebook codebook;
    ValidityReport report;
};

// Throws ValidationError on malformed files or dimension mismatches. The
// validity report is returned, not thrown.
LoadedCodebook load(const std::filesystem::path& path);
LoadedCodebook from_json_string(const std::string& text);

}  // namespace ecoc
