#pragma once

#include <stdexcept>

namespace ecsim {

/// Thrown when an input violates a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computed object fails one of its numerical invariants
/// (completeness, trace preservation, unitarity, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ecsim
