#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rydchan {

/// Base of every error thrown by the library. The CLI maps the subclasses
/// onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a formula, e.g. a pole of J(V).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mismatched arguments such as density matrices in different bases.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// System too large for the dense representation (exit code 4).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Two eigenstates closer than the degeneracy threshold are coupled by the
/// position-dependent perturbation, so second-order perturbation theory is
/// invalid for them.
class DegeneracyError : public NumericalError {
 public:
  DegeneracyError(std::size_t n, std::size_t m, double gap, double coupling)
      : NumericalError("degenerate coupled eigenpair (" + std::to_string(n) + ", " +
                       std::to_string(m) + "): |E_n - E_m| = " + std::to_string(gap) +
                       ", max|w| = " + std::to_string(coupling)),
        n_(n),
        m_(m) {}

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

 private:
  std::size_t n_;
  std::size_t m_;
};

/// Wavefunction density reached the edge of the relative-coordinate grid.
class GridError : public NumericalError {
 public:
  GridError(const std::string& what, double suggested_extent)
      : NumericalError(what), suggested_extent_(suggested_extent) {}

  double suggested_extent() const { return suggested_extent_; }

 private:
  double suggested_extent_;
};

/// Halving the time step changed the result by more than the tolerance.
class StepError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rydchan
