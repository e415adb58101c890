#pragma once

#include <stdexcept>
#include <string>

namespace mcsd {

/// Invalid shapes, parameters, or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure (non-convergence, divergence, lost feasibility).
/// Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Polar projection requested for a matrix without full column rank.
class RankDeficiencyError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mcsd
