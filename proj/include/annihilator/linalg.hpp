#ifndef ANNIHILATOR_LINALG_HPP
#define ANNIHILATOR_LINALG_HPP

#include <algorithm>

#include "annihilator/common.hpp"

namespace annihilator::linalg {

struct SingularRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme singular values of a (possibly rectangular) matrix. For an m x n
/// matrix with m < n the minimum is reported as 0, since the map has a kernel.
inline SingularRange extreme_singular_values(const CMatrix& a) {
  if (a.size() == 0) return {0.0, 0.0};
  Eigen::BDCSVD<CMatrix> svd(a);
  if (svd.info() != Eigen::Success) {
    throw ConvergenceError("singular value iteration did not converge");
  }
  const auto& s = svd.singularValues();
  SingularRange r{s(s.size() - 1), s(0)};
  if (a.rows() < a.cols()) r.min = 0.0;
  return r;
}

inline double operator_norm(const CMatrix& a) { return extreme_singular_values(a).max; }

struct Eigenpair {
  double value = 0.0;
  CVector vector;
};

/// Smallest eigenvalue and a unit eigenvector of a Hermitian matrix.
inline Eigenpair smallest_eigenpair(const CMatrix& hermitian) {
  if (hermitian.rows() != hermitian.cols()) {
    throw DimensionError("smallest_eigenpair: matrix is not square");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigen-iteration did not converge");
  }
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

inline double smallest_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigen-iteration did not converge");
  }
  return es.eigenvalues()(0);
}

}  // namespace annihilator::linalg

#endif  // ANNIHILATOR_LINALG_HPP
