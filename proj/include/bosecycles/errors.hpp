#pragma once

#include <stdexcept>
#include <string>

namespace bosecycles {

// Argument outside the mathematical domain of a function (a <= 0, z > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Structurally invalid input: short arrays, out-of-range fractions, bad configs.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested feature is outside what the library supports (d < 3 for
// condensation quantities, potentials lacking the positivity flags, ...).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation ran but could not meet its accuracy contract.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace bosecycles
