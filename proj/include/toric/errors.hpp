#pragma once

#include <stdexcept>
#include <string>

namespace toric {

// Base for errors raised by the library. Argument errors (rank mismatch,
// empty inputs, points outside a domain) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A comparison of reals could not be decided within the precision ceiling.
class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

// Malformed JSON job or value.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace toric
