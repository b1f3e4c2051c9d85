#pragma once

#include <stdexcept>
#include <string>

namespace podfem {

// Invalid arguments: out-of-range orders, indices, dimensions.
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Quadrature non-convergence, loss of positive definiteness, solver breakdown.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad run configuration or unusable persisted artifacts.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace podfem
