#pragma once

#include <stdexcept>
#include <string>

namespace segreg {

// Base of every exception thrown by the library. The CLI maps all of these
// to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated (bad grid, size mismatch, empty
// mask, out-of-range weights...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Non-finite values produced or consumed by a numerical routine.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace segreg
