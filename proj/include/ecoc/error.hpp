#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ecoc {

// Input that is well-typed but violates a domain rule (bad codebook file,
// config schema violations, generation that found no valid candidate).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
    ValidationError(const std::string& what, std::vector<std::string> problems)
        : std::runtime_error(what), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Non-finite values during training or evaluation.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ecoc
