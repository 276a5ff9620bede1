#ifndef ANNIHILATOR_BASIS_HPP
#define ANNIHILATOR_BASIS_HPP

#include <cmath>
#include <string>

#include "annihilator/common.hpp"
#include "annihilator/group.hpp"
#include "annihilator/linalg.hpp"
#include "annihilator/rng.hpp"

namespace annihilator {

inline constexpr double kBasisTolerance = 1e-10;

struct RieszBounds {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Dual column set of an invertible square column matrix: the columns of
/// B^{-H}, so that <B_j, B*_k> = delta_jk. Works on raw columns, no
/// normalization is assumed on input or applied to output.
inline CMatrix dual_columns(const CMatrix& columns) {
  if (columns.rows() != columns.cols()) throw DimensionError("dual_columns: matrix is not square");
  Eigen::BDCSVD<CMatrix> svd(columns, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw ConvergenceError("dual_columns: SVD did not converge");
  const auto& s = svd.singularValues();
  if (s.size() == 0) return columns;
  if (s(s.size() - 1) <= kBasisTolerance) {
    throw ConditioningError("dual_columns: smallest singular value " + std::to_string(s(s.size() - 1)));
  }
  // B = U S V^H  =>  B^{-H} = U S^{-1} V^H.
  return svd.matrixU() * s.cwiseInverse().asDiagonal() * svd.matrixV().adjoint();
}

/// A normalized basis of C^d with its dual and Riesz bounds cached.
///
/// Invariants (checked on construction): square column matrix, every column
/// of unit norm, smallest singular value above 1e-10.
class Basis {
 public:
  explicit Basis(CMatrix columns) : columns_(std::move(columns)) {
    if (columns_.rows() != columns_.cols()) {
      throw InvariantError("square", "basis needs d columns of length d, got " +
                                         std::to_string(columns_.rows()) + "x" +
                                         std::to_string(columns_.cols()));
    }
    for (Eigen::Index j = 0; j < columns_.cols(); ++j) {
      const double n = columns_.col(j).norm();
      if (std::abs(n - 1.0) > kBasisTolerance) {
        throw InvariantError("unit_columns", "column " + std::to_string(j) + " has norm " + std::to_string(n));
      }
    }
    Eigen::BDCSVD<CMatrix> svd(columns_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw ConvergenceError("Basis: SVD did not converge");
    const auto& s = svd.singularValues();
    if (s.size() > 0) {
      if (s(s.size() - 1) <= kBasisTolerance) {
        throw InvariantError("linear_independence",
                             "smallest singular value " + std::to_string(s(s.size() - 1)));
      }
      dual_ = svd.matrixU() * s.cwiseInverse().asDiagonal() * svd.matrixV().adjoint();
      // The analysis map is B^{-1}, whose singular values are 1/s.
      bounds_ = {1.0 / s(0), 1.0 / s(s.size() - 1)};
    } else {
      dual_ = columns_;
    }
    const CMatrix gram = columns_.adjoint() * columns_;
    orthonormal_ = (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <
                   kBasisTolerance;
    if (columns_.size() == 0) orthonormal_ = true;
  }

  Eigen::Index dim() const noexcept { return columns_.cols(); }
  const CMatrix& columns() const noexcept { return columns_; }
  const CMatrix& dual() const noexcept { return dual_; }
  const RieszBounds& bounds() const noexcept { return bounds_; }
  double alpha() const noexcept { return bounds_.alpha; }
  double beta() const noexcept { return bounds_.beta; }
  bool orthonormal() const noexcept { return orthonormal_; }

 private:
  CMatrix columns_;
  CMatrix dual_;
  RieszBounds bounds_;
  bool orthonormal_ = false;
};

inline const CMatrix& dual_basis(const Basis& phi) { return phi.dual(); }

/// Extreme singular values of a -> (<a, phi*_j>)_j.
inline RieszBounds riesz_bounds(const Basis& phi) { return phi.bounds(); }

/// max_{j,k} |<A_j, B_k>| over two raw column sets.
inline double coherence(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("coherence: dimension mismatch");
  if (a.size() == 0 || b.size() == 0) return 0.0;
  return (b.adjoint() * a).cwiseAbs().maxCoeff();
}

inline double coherence(const Basis& phi, const Basis& psi) {
  return coherence(phi.columns(), psi.columns());
}

/// Coefficients <a, phi*_j>.
inline CVector analysis(const CVector& a, const Basis& phi) {
  require_same_size(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(phi.dim()), "analysis");
  return phi.dual().adjoint() * a;
}

/// sum_j c_j phi_j.
inline CVector synthesis(const CVector& c, const Basis& phi) {
  require_same_size(static_cast<std::size_t>(c.size()), static_cast<std::size_t>(phi.dim()), "synthesis");
  return phi.columns() * c;
}

inline Basis standard_basis(Eigen::Index d) { return Basis(CMatrix::Identity(d, d)); }

/// Columns |G|^{-1/2} (<xi, x>)_x, one per dual element in canonical order.
inline Basis fourier_basis(const GroupSpec& spec) {
  const std::size_t n = spec.cardinality();
  const RootTable roots(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CMatrix m(spec.dim(), spec.dim());
  for (std::size_t xi = 0; xi < n; ++xi) {
    for (std::size_t x = 0; x < n; ++x) {
      m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(xi)) = roots[spec.phase_index(xi, x)] * scale;
    }
  }
  return Basis(std::move(m));
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the diagonal
/// of R rotated onto the positive reals.
inline CMatrix random_unitary(Eigen::Index d, Rng& rng) {
  CMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) {
    const cplx rjj = r(j, j);
    const double m = std::abs(rjj);
    if (m > 0.0) q.col(j) *= rjj / m;
  }
  return q;
}

inline Basis random_orthonormal_basis(Eigen::Index d, Rng& rng) {
  CMatrix q = random_unitary(d, rng);
  // Re-normalize away the last ulp so the unit-column invariant is exact.
  for (Eigen::Index j = 0; j < d; ++j) q.col(j).normalize();
  return Basis(std::move(q));
}

}  // namespace annihilator

#endif  // ANNIHILATOR_BASIS_HPP
