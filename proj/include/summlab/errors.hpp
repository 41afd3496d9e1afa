#pragma once

#include <stdexcept>
#include <string>

namespace summlab {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or arities that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A numeric argument outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Zero vectors or families where a nonzero one is required.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A configured work limit (tuples, dimension, samples) would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Parameters outside the range where a bound formula is claimed.
class ValidityError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or serialized input.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace summlab
