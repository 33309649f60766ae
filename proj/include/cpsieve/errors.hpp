#pragma once

#include <stdexcept>
#include <string>

namespace cpsieve {

/// Bad input files, malformed parameters, unknown names. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation would exceed a configured budget. CLI exit code 3.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A mathematical precondition is violated (non-prime characteristic,
/// context mismatch, singular carrier point, ...). CLI exit code 4.
struct MathError : std::runtime_error {
    explicit MathError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cpsieve
