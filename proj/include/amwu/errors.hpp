#pragma once

#include <stdexcept>
#include <string>

namespace amwu {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A point or tangent vector violates its domain invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An MWU factor 1 - alpha * df/dx_i (or its weighted sum) is not positive.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

/// A weight underflowed to zero; the iterate reached the simplex boundary.
class BoundaryReached : public Error {
 public:
  using Error::Error;
};

class NoRootInUnitInterval : public Error {
 public:
  using Error::Error;
};

class NotCritical : public Error {
 public:
  using Error::Error;
};

class NotSaddle : public Error {
 public:
  using Error::Error;
};

class NoSaddleFound : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Wraps a step failure with the iteration index at which it happened.
class RunError : public Error {
 public:
  RunError(long iteration, const std::string& what)
      : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

}  // namespace amwu
