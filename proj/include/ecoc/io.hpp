#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ecoc {

// Dense P x K matrix of per-pixel bit probabilities, row-major.
struct ProbabilityMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

// Binary blob: P and K as little-endian uint32, then P*K little-endian
// float32 values, row-major.
ProbabilityMatrix read_probability_blob(const std::filesystem::path& path);
void write_probability_blob(const std::filesystem::path& path, const ProbabilityMatrix& m);

// One pixel per line, K comma-separated reals. '#' lines are skipped.
ProbabilityMatrix read_probability_csv(const std::filesystem::path& path);

// Picks CSV for a .csv extension, blob otherwise.
ProbabilityMatrix read_probabilities(const std::filesystem::path& path);

// One non-negative integer per line ('#' lines skipped).
std::vector<std::size_t> read_class_ids(const std::filesystem::path& path);

// Comment block carried by every output file.
struct OutputHeader {
    std::string command;
    std::vector<std::uint64_t> seeds;
};

std::string header_lines(const OutputHeader& h, const std::string& prefix = "# ");

// ASCII PGM (P2) with classes spread over 0..255.
std::string pgm_string(std::span<const std::size_t> labels, std::size_t height, std::size_t width,
                       std::size_t n_classes, const OutputHeader& h);

void write_text(const std::filesystem::path& path, const std::string& text);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

}  // namespace ecoc
