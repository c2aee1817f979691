#pragma once

#include <stdexcept>
#include <string>

namespace fluency {

// Exception hierarchy. The CLI maps each family to an exit code:
// UsageError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or configuration supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed, missing or insufficient input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Training divergence or another non-finite numeric result.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace fluency
