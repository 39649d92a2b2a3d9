#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hoibc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented working range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (branch cut, r <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an API contract (wrong order tag, dimension mismatch).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Input configuration rejected during validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// tan(k_z d) hit a pole; `branch` is the n in pi/2 + n*pi.
class ResonanceError : public NumericalError {
 public:
  ResonanceError(const std::string& what, long branch)
      : NumericalError(what), branch_(branch) {}
  long branch() const noexcept { return branch_; }

 private:
  long branch_;
};

/// Rational fit could not be formed (zero Taylor slope, collinear nodes,
/// ill-conditioned collocation system).
class DegenerateFitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, std::size_t column)
      : NumericalError(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Mesh too coarse for the wavelength.
class ResolutionError : public NumericalError {
 public:
  ResolutionError(const std::string& what, std::size_t element)
      : NumericalError(what), element_(element) {}
  std::size_t element() const noexcept { return element_; }

 private:
  std::size_t element_;
};

class MeshError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hoibc
