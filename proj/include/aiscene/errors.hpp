#pragma once

#include <stdexcept>
#include <string>

namespace aiscene {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed on-disk data (truncated binary files, unparsable manifests).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must agree in size or shape do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numeric content outside its valid domain (non-distributions, NaN, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace aiscene
