#pragma once

#include <stdexcept>
#include <string>

namespace entropy_games {

// Malformed input: ragged matrices, bad pmfs, unparsable numbers.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument shapes that do not match (vector length vs. matrix rows, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Enumeration or memory cap exceeded.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Requested extraction/simulation rates are not achievable.
class EntropyDeficit : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A proven inequality failed numerically. Always a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace entropy_games
