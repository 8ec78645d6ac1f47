// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace lidarsim {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scene, mesh, spectrum, mapping or config text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain an operation accepts.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A beam that does not project inside the capture it was assigned to.
class OutOfFrustumError : public RangeError {
 public:
  using RangeError::RangeError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lidarsim
