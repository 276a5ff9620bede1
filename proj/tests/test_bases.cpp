#include <gtest/gtest.h>

#include "annihilator/basis.hpp"
#include "oracles.hpp"

using namespace annihilator;

namespace {

/// {(1,0), (1,1)/sqrt 2}
CMatrix skew2() {
  CMatrix m(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  m << 1.0, r, 0.0, r;
  return m;
}

Basis random_skewed(Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed, 0, Purpose::basis_phi);
  CMatrix m = CMatrix::Identity(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) += 0.4 * rng.complex_normal();
    m.col(j).normalize();
  }
  return Basis(m);
}

}  // namespace

TEST(Basis, InvariantsNameTheFailure) {
  try {
    Basis b(CMatrix::Identity(3, 2));
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_EQ(e.invariant(), "square");
  }
  try {
    Basis b(2.0 * CMatrix::Identity(2, 2));
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_EQ(e.invariant(), "unit_columns");
  }
  CMatrix dup(2, 2);
  dup << 1, 1, 0, 0;
  try {
    Basis b(dup);
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_EQ(e.invariant(), "linear_independence");
  }
}

TEST(DualBasis, OrthonormalIsSelfDual) {
  Rng rng(2, 0, Purpose::basis_phi);
  const Basis u = random_orthonormal_basis(6, rng);
  EXPECT_LT((dual_basis(u) - u.columns()).norm(), 1e-12);
  const Basis e = standard_basis(5);
  EXPECT_LT((dual_basis(e) - CMatrix::Identity(5, 5)).norm(), 1e-15);
}

TEST(DualBasis, HandInvertedTwoByTwo) {
  const Basis b(skew2());
  const CMatrix& d = dual_basis(b);
  EXPECT_NEAR(std::abs(d(0, 0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(d(1, 0) + 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(d(0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(d(1, 1) - std::sqrt(2.0)), 0.0, 1e-12);
}

TEST(DualBasis, BiorthogonalAndMatchesLuOracle) {
  const Basis b = random_skewed(7, 4);
  const CMatrix& d = b.dual();
  EXPECT_LT((b.columns().adjoint() * d - CMatrix::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((d - oracle::dual(b.columns())).norm(), 1e-10);
}

TEST(DualBasis, DualOfDualOnRawColumns) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Basis b = random_skewed(8, s);
    EXPECT_LT((dual_columns(dual_columns(b.columns())) - b.columns()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(DualBasis, NearSingularIsConditioningError) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 1.0;
  m(1, 1) = 1e-13;
  EXPECT_THROW(dual_columns(m), ConditioningError);
}

TEST(RieszBounds, OrthonormalGivesOne) {
  Rng rng(9, 0, Purpose::basis_phi);
  const Basis u = random_orthonormal_basis(10, rng);
  EXPECT_NEAR(u.alpha(), 1.0, 1e-10);
  EXPECT_NEAR(u.beta(), 1.0, 1e-10);
  EXPECT_TRUE(u.orthonormal());
  const auto rb = riesz_bounds(standard_basis(4));
  EXPECT_EQ(rb.alpha, 1.0);
  EXPECT_EQ(rb.beta, 1.0);
}

TEST(RieszBounds, SkewTwoByTwo) {
  const Basis b(skew2());
  // Reciprocal singular values of the column matrix: sqrt(1 -+ 1/sqrt 2)^{-1}.
  EXPECT_NEAR(b.alpha(), 1.0 / std::sqrt(1.0 + 1.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(b.beta(), 1.0 / std::sqrt(1.0 - 1.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(b.alpha(), 0.76537, 1e-5);
  EXPECT_NEAR(b.beta(), 1.84776, 1e-5);
  EXPECT_FALSE(b.orthonormal());
}

TEST(RieszBounds, SandwichOnRandomVectors) {
  const Basis b = random_skewed(6, 11);
  EXPECT_LE(b.alpha(), 1.0 + 1e-12);
  EXPECT_GE(b.beta(), 1.0 - 1e-12);
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(11, t, Purpose::vector);
    const CVector a = rng.unit_vector(6);
    const double n = analysis(a, b).norm();
    EXPECT_GE(n, b.alpha() - 1e-10);
    EXPECT_LE(n, b.beta() + 1e-10);
  }
}

TEST(Basis, OrthonormalDetection) {
  const Basis b = random_skewed(5, 3);
  EXPECT_FALSE(b.orthonormal());
  EXPECT_GT(b.beta() - b.alpha(), 1e-3);
  CMatrix near = CMatrix::Identity(3, 3);
  near(0, 1) = 1e-12;
  near.col(1).normalize();
  EXPECT_TRUE(Basis(near).orthonormal());
  near(0, 1) = 1e-8;
  near.col(1).normalize();
  EXPECT_FALSE(Basis(near).orthonormal());
}

TEST(Coherence, Examples) {
  const GroupSpec z4({4});
  EXPECT_NEAR(coherence(standard_basis(4), fourier_basis(z4)), 0.5, 1e-15);
  Rng rng(1, 0, Purpose::basis_phi);
  const Basis u = random_orthonormal_basis(5, rng);
  EXPECT_NEAR(coherence(u, u), 1.0, 1e-12);
  Rng r1(8, 0, Purpose::basis_phi), r2(8, 0, Purpose::basis_psi);
  const Basis a = random_orthonormal_basis(8, r1), b = random_orthonormal_basis(8, r2);
  const double m = coherence(a, b);
  EXPECT_NEAR(m, oracle::coherence(a.columns(), b.columns()), 1e-14);
  EXPECT_GE(m, 1.0 / std::sqrt(8.0));
  EXPECT_LE(m, 1.0 + 1e-12);
  EXPECT_THROW(coherence(standard_basis(3), standard_basis(4)), DimensionError);
}

TEST(FourierBasis, SmallTables) {
  const Basis z2 = fourier_basis(GroupSpec({2}));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(z2.columns()(0, 0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(z2.columns()(1, 0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(z2.columns()(0, 1) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(z2.columns()(1, 1) + r), 0.0, 1e-15);

  const Basis h = fourier_basis(GroupSpec::parse("2x2"));
  CMatrix had(4, 4);
  had << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  EXPECT_LT((h.columns() - had / 2.0).norm(), 1e-15);
  EXPECT_TRUE(h.orthonormal());
}

TEST(FourierBasis, UnbiasedWithStandardOnProducts) {
  for (const char* s : {"6", "2x3", "3x3", "2x2x2"}) {
    const GroupSpec g = GroupSpec::parse(s);
    const Basis f = fourier_basis(g);
    EXPECT_TRUE(f.orthonormal());
    const Eigen::MatrixXd ip = f.columns().cwiseAbs();
    EXPECT_NEAR(ip.maxCoeff(), 1.0 / std::sqrt(static_cast<double>(g.cardinality())), 1e-14);
    EXPECT_NEAR(ip.minCoeff(), 1.0 / std::sqrt(static_cast<double>(g.cardinality())), 1e-14);
  }
}

TEST(AnalysisSynthesis, Examples) {
  const Basis b = random_skewed(5, 21);
  const CVector c = analysis(b.columns().col(3), b);
  CVector e3 = CVector::Zero(5);
  e3(3) = 1.0;
  EXPECT_LT((c - e3).norm(), 1e-12);
  EXPECT_EQ(analysis(CVector::Zero(5), b).norm(), 0.0);
  Rng rng(21, 1, Purpose::vector);
  const CVector a = rng.complex_gaussian(5);
  const CVector coeffs = analysis(a, b);
  EXPECT_LT((synthesis(coeffs, b) - a).norm(), 1e-10);
  EXPECT_LT((coeffs - b.columns().lu().solve(a)).norm(), 1e-10);
  EXPECT_THROW(analysis(CVector::Zero(4), b), DimensionError);
}

TEST(AnalysisSynthesis, OrthonormalCoefficientsAreInnerProducts) {
  Rng rng(3, 0, Purpose::basis_phi);
  const Basis u = random_orthonormal_basis(6, rng);
  const CVector a = rng.complex_gaussian(6);
  const CVector c = analysis(a, u);
  for (Eigen::Index j = 0; j < 6; ++j) EXPECT_NEAR(std::abs(c(j) - u.columns().col(j).dot(a)), 0.0, 1e-12);
}

TEST(RandomBasis, DeterministicGivenSeed) {
  Rng a(5, 2, Purpose::basis_phi), b(5, 2, Purpose::basis_phi), c(6, 2, Purpose::basis_phi);
  const CMatrix x = random_orthonormal_basis(7, a).columns();
  EXPECT_EQ(x, random_orthonormal_basis(7, b).columns());
  EXPECT_NE(x, random_orthonormal_basis(7, c).columns());
}
