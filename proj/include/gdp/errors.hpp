#pragma once

#include <stdexcept>
#include <string>

namespace gdp {

// Bad inputs: invalid hyper-parameters, malformed CSV, degenerate designs.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: factorization failure, series non-convergence,
// weight underflow in degenerate states.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller misuse that the CLI reports as a usage problem.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gdp
