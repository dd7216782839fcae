#pragma once

#include <stdexcept>
#include <string>

namespace galmod {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, out-of-range level, schema violation.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Operands live over different primes or ambient spaces.
class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// The theorem hypotheses required by an operation do not hold.
class HypothesisNotMet : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A computed object contradicts a theorem; the datum is not realizable.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

/// p-adic computation ran out of digits.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

}  // namespace galmod
