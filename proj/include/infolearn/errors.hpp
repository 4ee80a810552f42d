#pragma once

#include <stdexcept>
#include <string>

namespace infolearn {

/// Argument outside the mathematical domain of a formula (nonpositive variance,
/// epsilon outside a bound's validity interval, vacuous log argument, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid experiment or network configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dimension mismatch between vectors / matrices.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data violating a structural precondition (e.g. a row not on the scaled simplex).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values encountered during a numeric computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infolearn
