#pragma once

#include <stdexcept>
#include <string>

namespace ncspace {

/// Raised when an argument lies outside the mathematical domain of an
/// operation (an exponent below 1, a non-PSD input where positivity is
/// required, NaN entries, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shape or dimension mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructed matrix would exceed the configured dimension cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed NCMAT / NCVEC / config input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ncspace
