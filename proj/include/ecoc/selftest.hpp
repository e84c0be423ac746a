#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ecoc/codebook.hpp"

namespace ecoc {

struct SuiteResult {
    std::string name;
    bool passed = false;
    double statistic = 0.0;  // worst observed value of the suite's test quantity
    double limit = 0.0;      // pass iff statistic stays within this bound
    std::string detail;
};

struct SelftestOptions {
    std::uint64_t seed = 20240601;
    std::size_t gradient_points = 100;
    std::size_t identity_instances = 10000;
    std::size_t correction_trials = 1000;
    std::size_t noise_labels = 100000;
    double noise_eps = 0.3;
    // Mutation fixture: perturbs every analytic gradient by 0.1% so the
    // finite-difference suites must fail.
    bool inject_gradient_bug = false;
};

// loss is one of bce, pcd, pcc, total, ce.
SuiteResult gradient_suite(const std::string& loss, const SelftestOptions& opts);

// Softmax form of the contrastive loss against its pairwise rewrite.
SuiteResult pcc_identity_suite(const SelftestOptions& opts);

// Random (codebook, class, flip set) triples with at most
// floor((d_min_row - 1) / 2) flipped bits must decode to the class.
SuiteResult error_correction_suite(const SelftestOptions& opts);

// Empirical per-bit flip rates under uniform class flips against
// exact_bit_noise, each within 3 Monte-Carlo standard deviations.
SuiteResult bit_noise_suite(const std::string& name, const Codebook& cb, const SelftestOptions& opts);

// The codebooks the bit-noise suite runs on: one_hot(8), a K = 32 mmd
// codebook and a complementary 2-class codebook.
std::vector<std::pair<std::string, Codebook>> bit_noise_codebooks(std::uint64_t seed);

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts);

}  // namespace ecoc
