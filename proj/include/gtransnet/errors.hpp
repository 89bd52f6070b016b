#pragma once

#include <stdexcept>
#include <string>

namespace gtransnet {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on arguments or configuration was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (non-finite data, factorization failure, sampler cap).
class NumericalError : public Error {
 public:
  using Error::Error;
};

void log_warning(const std::string& message);

}  // namespace gtransnet
