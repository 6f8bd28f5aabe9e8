#pragma once

#include <stdexcept>
#include <string>

namespace evalbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not chain or do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value became NaN or infinite where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (IDX, CSV, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace evalbench
