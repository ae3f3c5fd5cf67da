#pragma once

#include <stdexcept>
#include <string>

namespace vqt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, non-Hermitian input, bad ranges.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive semidefinite has an eigenvalue below tolerance.
class NotPositiveSemidefinite : public Error {
 public:
  using Error::Error;
};

/// Field or Hilbert-space size beyond what the constructions support.
class UnsupportedSize : public Error {
 public:
  using Error::Error;
};

/// Dimension is not a prime power, so no mutually unbiased bases are available.
class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// Overlap matrix is singular or too ill-conditioned to invert.
class SingularBasis : public Error {
 public:
  using Error::Error;
};

/// Entanglement fraction requested against a reference with zero entanglement.
class UndefinedFraction : public Error {
 public:
  using Error::Error;
};

/// The conic solver could not produce a usable answer.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace vqt
