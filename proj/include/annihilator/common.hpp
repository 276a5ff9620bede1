#ifndef ANNIHILATOR_COMMON_HPP
#define ANNIHILATOR_COMMON_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace annihilator {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Complex vector indexed by group elements in canonical (row-major) order.
using Signal = CVector;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lengths, coordinate counts or matrix shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible is numerically singular.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its cap without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual = 0.0, double objective = 0.0)
      : Error(what), residual_(residual), objective_(objective) {}
  double residual() const noexcept { return residual_; }
  double objective() const noexcept { return objective_; }

 private:
  double residual_;
  double objective_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input (group strings, index lists, JSON payloads).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A loaded object violates one of its type invariants.
class InvariantError : public Error {
 public:
  InvariantError(std::string invariant, const std::string& detail)
      : Error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": size " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace annihilator

#endif  // ANNIHILATOR_COMMON_HPP
