#pragma once

#include <stdexcept>
#include <string>

namespace topoloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments violate a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured size or enumeration limit would be exceeded.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity violates a physical or algebraic invariant.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace topoloc
