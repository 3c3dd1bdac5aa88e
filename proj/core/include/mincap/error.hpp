#pragma once

#include <stdexcept>
#include <string>

namespace mincap {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range arguments (bad radii, bad JSON, domain violations).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A flux constant at or above the local weight w^{n-1}(r).
class SingularInputError : public Error {
 public:
  using Error::Error;
};

/// The drop integrand fails to exist on a set of positive length.
class NonIntegrableError : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver gave up; carries the last residual for diagnostics.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}
  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace mincap
