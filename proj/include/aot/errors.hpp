#pragma once

#include <stdexcept>
#include <string>

namespace aot {

/// Invalid input: malformed files, inconsistent dimensions, rejected sizes.
/// Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal numeric failure: solver non-convergence, quadrature residual
/// above tolerance. Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace aot
