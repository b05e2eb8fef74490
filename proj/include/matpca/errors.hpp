#pragma once

#include <stdexcept>
#include <string>

namespace matpca {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible matrix/dataset dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid argument value (out-of-range rank, bad proportion, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A size guard was exceeded (e.g. dense Kronecker materialization).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Too few (effective) observations to fit the requested model.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-positive-definite covariance, singular update, ...
// Carries the iteration index when the failure happened inside an iterative
// fit (-1 when not applicable).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, long iteration = -1)
      : Error(what), iteration(iteration) {}
  long iteration;
};

// A whole estimation procedure failed (e.g. every candidate start singular).
class EstimationError : public Error {
 public:
  using Error::Error;
};

// File/serialization problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace matpca
