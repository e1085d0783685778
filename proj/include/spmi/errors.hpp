#pragma once

#include <stdexcept>
#include <string>

namespace spmi {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates an operation's precondition.
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

// Input data is structurally valid but carries no usable signal
// (e.g. zero-variance pseudo-observations, empty vocabulary after filtering).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// A masked matrix has no observed entries at all.
class NoObservedDataError : public Error {
 public:
  using Error::Error;
};

// Two matrices that must be conformable are not.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure (open/read/write).
class IoError : public Error {
 public:
  using Error::Error;
};

// The bytes read do not form a valid matrix file (bad magic, truncation, ...).
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

// The file is a matrix file but from an unsupported format version.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace spmi
