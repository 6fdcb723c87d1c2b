#pragma once

#include <stdexcept>
#include <string>

namespace ureach {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Exhaustive sign enumeration refused; callers usually fall back to Frobenius.
class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

/// Taylor remainder of the interval exponential does not converge at this order.
class RemainderDiverges : public Error {
 public:
  using Error::Error;
};

/// Eigenvector matrix too ill-conditioned for the diagonalization-based bound.
class Defective : public Error {
 public:
  using Error::Error;
};

/// Largest singular value is not simple; first-order sensitivity is undefined.
class DegenerateSV : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace ureach
