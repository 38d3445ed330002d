#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mgb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSymmetricError : public Error {
 public:
  using Error::Error;
};

/// Raised when a Cholesky certificate fails; carries the failing pivot.
class NotSpdError : public Error {
 public:
  NotSpdError(const std::string& what, std::ptrdiff_t pivot)
      : Error(what), pivot_(pivot) {}
  std::ptrdiff_t pivot() const noexcept { return pivot_; }

 private:
  std::ptrdiff_t pivot_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DenseCapError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a scalar argument or structural input failed.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A mathematical invariant that the theory guarantees did not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mgb
