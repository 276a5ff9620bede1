// Naive reference implementations used only by the tests. They share no code
// with the library beyond the Eigen vector types.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Orders = std::vector<int>;

inline int card(const Orders& o) {
  int n = 1;
  for (int d : o) n *= d;
  return n;
}

/// Row-major coordinates, first factor slowest.
inline std::vector<int> coords(const Orders& o, int idx) {
  std::vector<int> c(o.size());
  for (int j = static_cast<int>(o.size()) - 1; j >= 0; --j) {
    c[static_cast<std::size_t>(j)] = idx % o[static_cast<std::size_t>(j)];
    idx /= o[static_cast<std::size_t>(j)];
  }
  return c;
}

inline int index(const Orders& o, const std::vector<int>& c) {
  int idx = 0;
  for (std::size_t j = 0; j < o.size(); ++j) idx = idx * o[j] + ((c[j] % o[j]) + o[j]) % o[j];
  return idx;
}

inline int add(const Orders& o, int a, int b) {
  auto ca = coords(o, a), cb = coords(o, b);
  for (std::size_t j = 0; j < o.size(); ++j) ca[j] += cb[j];
  return index(o, ca);
}

inline int neg(const Orders& o, int a) {
  auto ca = coords(o, a);
  for (auto& v : ca) v = -v;
  return index(o, ca);
}

inline int sub(const Orders& o, int a, int b) { return add(o, a, neg(o, b)); }

/// exp(2 pi i sum xi_j x_j / d_j), evaluated with a real-valued phase.
inline cplx chi(const Orders& o, int xi, int x) {
  const auto a = coords(o, xi), b = coords(o, x);
  double phase = 0.0;
  for (std::size_t j = 0; j < o.size(); ++j) phase += static_cast<double>(a[j] * b[j]) / o[j];
  return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

inline Vec dft(const Orders& o, const Vec& f) {
  const int n = card(o);
  Vec out = Vec::Zero(n);
  for (int xi = 0; xi < n; ++xi) {
    for (int x = 0; x < n; ++x) out(xi) += f(x) * std::conj(chi(o, xi, x));
  }
  return out / std::sqrt(static_cast<double>(n));
}

inline Vec idft(const Orders& o, const Vec& fh) {
  const int n = card(o);
  Vec out = Vec::Zero(n);
  for (int x = 0; x < n; ++x) {
    for (int xi = 0; xi < n; ++xi) out(x) += fh(xi) * chi(o, xi, x);
  }
  return out / std::sqrt(static_cast<double>(n));
}

/// out(eta, u) = |G|^{-1} sum_{x, xi} F(x, xi) conj<eta, x> conj<xi, u>, eta-major.
inline Vec dft_product(const Orders& o, const Vec& F) {
  const int n = card(o);
  Vec out = Vec::Zero(n * n);
  for (int eta = 0; eta < n; ++eta) {
    for (int u = 0; u < n; ++u) {
      cplx acc = 0.0;
      for (int x = 0; x < n; ++x) {
        for (int xi = 0; xi < n; ++xi) acc += F(x * n + xi) * std::conj(chi(o, eta, x)) * std::conj(chi(o, xi, u));
      }
      out(eta * n + u) = acc / static_cast<double>(n);
    }
  }
  return out;
}

inline Vec translate(const Orders& o, const Vec& f, int x) {
  const int n = card(o);
  Vec out(n);
  for (int y = 0; y < n; ++y) out(y) = f(sub(o, y, x));
  return out;
}

inline Vec modulate(const Orders& o, const Vec& f, int xi) {
  const int n = card(o);
  Vec out(n);
  for (int y = 0; y < n; ++y) out(y) = f(y) * chi(o, xi, y);
  return out;
}

/// V_g f(x, xi) = |G|^{-1/2} sum_t f(t) conj(g(t - x)) conj<xi, t>, x-major.
inline Vec stft(const Orders& o, const Vec& f, const Vec& g) {
  const int n = card(o);
  Vec out = Vec::Zero(n * n);
  for (int x = 0; x < n; ++x) {
    for (int xi = 0; xi < n; ++xi) {
      cplx acc = 0.0;
      for (int t = 0; t < n; ++t) acc += f(t) * std::conj(g(sub(o, t, x))) * std::conj(chi(o, xi, t));
      out(x * n + xi) = acc / std::sqrt(static_cast<double>(n));
    }
  }
  return out;
}

/// Dual columns through an explicit LU inverse.
inline Mat dual(const Mat& b) { return b.inverse().adjoint(); }

/// ||a||_{l2(B, E^c)} with coefficients <a, B*_j> from the LU dual.
inline double tail(const Vec& a, const Mat& b, const std::vector<bool>& in_e) {
  const Vec c = dual(b).adjoint() * a;
  double s = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (!in_e[static_cast<std::size_t>(j)]) s += std::norm(c(j));
  }
  return std::sqrt(s);
}

/// Max |<A_j, B_k>| by explicit loops.
inline double coherence(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      cplx ip = 0.0;
      for (Eigen::Index i = 0; i < a.rows(); ++i) ip += a(i, j) * std::conj(b(i, k));
      m = std::max(m, std::abs(ip));
    }
  }
  return m;
}

/// Unitary DFT matrix of Z_d with rows indexed by frequency.
inline Mat dft_matrix(int d) {
  Mat t(d, d);
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) t(k, j) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), -2.0 * std::numbers::pi * k * j / d);
  }
  return t;
}

/// Extreme eigenvalues of A^H A through the general (non-Hermitian) solver.
inline std::pair<double, double> gram_extremes(const Mat& a) {
  Eigen::ComplexEigenSolver<Mat> es(a.adjoint() * a);
  const auto ev = es.eigenvalues().real();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace oracle
