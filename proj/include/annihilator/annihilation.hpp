#ifndef ANNIHILATOR_ANNIHILATION_HPP
#define ANNIHILATOR_ANNIHILATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "annihilator/basis.hpp"
#include "annihilator/common.hpp"
#include "annihilator/linalg.hpp"
#include "annihilator/rng.hpp"

namespace annihilator {

/// Sorted subset of {0, ..., dim - 1}. The complement is never stored.
class SupportSet {
 public:
  SupportSet() = default;

  SupportSet(std::vector<std::size_t> indices, std::size_t dim) : indices_(std::move(indices)), dim_(dim) {
    std::sort(indices_.begin(), indices_.end());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] >= dim_) {
        throw DomainError("support index " + std::to_string(indices_[i]) + " out of range for dimension " +
                          std::to_string(dim_));
      }
      if (i > 0 && indices_[i] == indices_[i - 1]) {
        throw DomainError("duplicate support index " + std::to_string(indices_[i]));
      }
    }
  }

  static SupportSet empty(std::size_t dim) { return SupportSet({}, dim); }

  static SupportSet full(std::size_t dim) {
    std::vector<std::size_t> all(dim);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return SupportSet(std::move(all), dim);
  }

  /// Parses "0,2,5"; the empty string is the empty set.
  static SupportSet parse(std::string_view text, std::size_t dim) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto comma = text.find(',', pos);
      if (comma == std::string_view::npos) comma = text.size();
      const auto token = text.substr(pos, comma - pos);
      if (token.empty()) throw ParseError("malformed index list '" + std::string(text) + "'");
      std::size_t v = 0;
      for (char c : token) {
        if (c < '0' || c > '9') throw ParseError("malformed index list '" + std::string(text) + "'");
        v = v * 10 + static_cast<std::size_t>(c - '0');
      }
      out.push_back(v);
      pos = comma + 1;
      if (comma == text.size()) break;
    }
    return SupportSet(std::move(out), dim);
  }

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return indices_.empty(); }

  bool contains(std::size_t j) const { return std::binary_search(indices_.begin(), indices_.end(), j); }

  /// Membership mask of length dim.
  std::vector<bool> mask() const {
    std::vector<bool> m(dim_, false);
    for (auto j : indices_) m[j] = true;
    return m;
  }

  std::vector<std::size_t> complement_indices() const {
    std::vector<std::size_t> out;
    out.reserve(dim_ - indices_.size());
    const auto m = mask();
    for (std::size_t j = 0; j < dim_; ++j) {
      if (!m[j]) out.push_back(j);
    }
    return out;
  }

  SupportSet complement() const { return SupportSet(complement_indices(), dim_); }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(indices_[i]);
    }
    return s;
  }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t dim_ = 0;
};

namespace detail {

inline void check_pair(const Basis& phi, const Basis& psi, const SupportSet& s, const SupportSet& sigma) {
  require_same_size(static_cast<std::size_t>(phi.dim()), static_cast<std::size_t>(psi.dim()), "basis pair");
  require_same_size(s.dim(), static_cast<std::size_t>(phi.dim()), "support S");
  require_same_size(sigma.dim(), static_cast<std::size_t>(phi.dim()), "support Sigma");
}

/// sum_{j not in S} w_j w_j^H for the columns w_j of `dual`.
inline CMatrix outside_projector(const CMatrix& dual, const SupportSet& s) {
  const auto out = s.complement_indices();
  CMatrix w(dual.rows(), static_cast<Eigen::Index>(out.size()));
  for (std::size_t k = 0; k < out.size(); ++k) w.col(static_cast<Eigen::Index>(k)) = dual.col(static_cast<Eigen::Index>(out[k]));
  return w * w.adjoint();
}

/// Rows Sigma, columns S of U with U_ij = <phi_j, psi_i>.
inline CMatrix concentration_block(const Basis& phi, const Basis& psi, const SupportSet& s, const SupportSet& sigma) {
  CMatrix block(static_cast<Eigen::Index>(sigma.size()), static_cast<Eigen::Index>(s.size()));
  for (std::size_t r = 0; r < sigma.size(); ++r) {
    for (std::size_t c = 0; c < s.size(); ++c) {
      const auto i = static_cast<Eigen::Index>(sigma.indices()[r]);
      const auto j = static_cast<Eigen::Index>(s.indices()[c]);
      block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = psi.columns().col(i).dot(phi.columns().col(j));
    }
  }
  return block;
}

}  // namespace detail

/// l2 norm of the coefficients outside S.
inline double tail_norm(const CVector& coefficients, const SupportSet& s) {
  require_same_size(static_cast<std::size_t>(coefficients.size()), s.dim(), "tail_norm");
  double acc = 0.0;
  const auto m = s.mask();
  for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
    if (!m[static_cast<std::size_t>(j)]) acc += std::norm(coefficients(j));
  }
  return std::sqrt(acc);
}

struct TailNorms {
  double phi_tail = 0.0;  ///< ||a||_{l2(Phi, S^c)}
  double psi_tail = 0.0;  ///< ||a||_{l2(Psi, Sigma^c)}
  double sum() const noexcept { return phi_tail + psi_tail; }
};

inline TailNorms tail_norms(const CVector& a, const Basis& phi, const Basis& psi, const SupportSet& s,
                            const SupportSet& sigma) {
  detail::check_pair(phi, psi, s, sigma);
  return {tail_norm(analysis(a, phi), s), tail_norm(analysis(a, psi), sigma)};
}

struct SupportCount {
  SupportSet support;
  std::size_t count = 0;
};

/// Indices with |<a, phi*_j>| > tol * max_k |<a, phi*_k>|.
inline SupportCount support_l0(const CVector& a, const Basis& phi, double tol = 1e-10) {
  if (tol < 0.0) throw DomainError("support_l0: tolerance must be >= 0");
  const CVector c = analysis(a, phi);
  const double peak = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  std::vector<std::size_t> idx;
  if (peak > 0.0) {
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      if (std::abs(c(j)) > tol * peak) idx.push_back(static_cast<std::size_t>(j));
    }
  }
  const auto n = idx.size();
  return {SupportSet(std::move(idx), static_cast<std::size_t>(phi.dim())), n};
}

struct EladBrucksteinBound {
  double product = 0.0;  ///< lower bound on |supp_Phi a| * |supp_Psi a|
  double sum = 0.0;      ///< lower bound on |supp_Phi a| + |supp_Psi a|
};

/// 1 / min{ beta(Phi)/alpha(Psi) M(Phi, Psi*), beta(Psi)/alpha(Phi) M(Phi*, Psi) }^2
/// and its arithmetic-mean form 2 / min{...}.
inline EladBrucksteinBound elad_bruckstein_bound(const Basis& phi, const Basis& psi) {
  require_same_size(static_cast<std::size_t>(phi.dim()), static_cast<std::size_t>(psi.dim()), "elad_bruckstein_bound");
  const double m1 = phi.beta() / psi.alpha() * coherence(phi.columns(), psi.dual());
  const double m2 = psi.beta() / phi.alpha() * coherence(phi.dual(), psi.columns());
  const double m = std::min(m1, m2);
  return {1.0 / (m * m), 2.0 / m};
}

/// P_Sigma U P_S as a full d x d matrix, U_ij = <phi_j, psi_i>.
inline CMatrix concentration_operator(const Basis& phi, const Basis& psi, const SupportSet& s, const SupportSet& sigma) {
  detail::check_pair(phi, psi, s, sigma);
  CMatrix out = CMatrix::Zero(phi.dim(), phi.dim());
  const CMatrix block = detail::concentration_block(phi, psi, s, sigma);
  for (std::size_t r = 0; r < sigma.size(); ++r) {
    for (std::size_t c = 0; c < s.size(); ++c) {
      out(static_cast<Eigen::Index>(sigma.indices()[r]), static_cast<Eigen::Index>(s.indices()[c])) =
          block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

struct NormsChain {
  double op_norm = 0.0;
  double hs_norm = 0.0;
  double coherence_bound = 0.0;  ///< M(Phi, Psi) sqrt(|S| |Sigma|)
};

inline constexpr double kChainTolerance = 1e-9;

/// ||P_Sigma U P_S|| <= ||P_Sigma U P_S||_HS <= M sqrt(|S||Sigma|).
inline NormsChain norms_chain(const Basis& phi, const Basis& psi, const SupportSet& s, const SupportSet& sigma) {
  detail::check_pair(phi, psi, s, sigma);
  const CMatrix block = detail::concentration_block(phi, psi, s, sigma);
  NormsChain c;
  c.op_norm = block.size() ? linalg::operator_norm(block) : 0.0;
  c.hs_norm = block.norm();
  c.coherence_bound = coherence(phi, psi) * std::sqrt(static_cast<double>(s.size() * sigma.size()));
  if (c.op_norm > c.hs_norm + kChainTolerance || c.hs_norm > c.coherence_bound + kChainTolerance) {
    throw std::logic_error("norms_chain: op <= hs <= M sqrt(|S||Sigma|) violated");
  }
  return c;
}

/// 1 + 1/(1 - M sqrt(s sigma)) when M^2 s sigma < 1.
inline std::optional<double> theorem_a_constant(double coherence_m, std::size_t s, std::size_t sigma) {
  if (!(coherence_m > 0.0 && coherence_m <= 1.0 + 1e-12)) {
    throw DomainError("theorem_a_constant: coherence must lie in (0, 1]");
  }
  const double prod = static_cast<double>(s) * static_cast<double>(sigma);
  if (coherence_m * coherence_m * prod >= 1.0) return std::nullopt;
  return 1.0 + 1.0 / (1.0 - coherence_m * std::sqrt(prod));
}

/// 1 + 1/(1 - ||P_Sigma U P_S||) when the operator norm is below 1.
inline std::optional<double> refined_constant_from_norm(double op_norm) {
  if (op_norm >= 1.0 - 1e-9) return std::nullopt;
  return 1.0 + 1.0 / (1.0 - op_norm);
}

inline std::optional<double> refined_constant(const Basis& phi, const Basis& psi, const SupportSet& s,
                                              const SupportSet& sigma) {
  return refined_constant_from_norm(norms_chain(phi, psi, s, sigma).op_norm);
}

inline constexpr double kWeakPairTolerance = 1e-10;

struct ExactBracket {
  double lo = 0.0;
  double hi = 0.0;
  double lambda_min = 0.0;
  bool weak_pair = false;
  CVector minimizer;  ///< unit eigenvector of Q for lambda_min
};

/// Q = sum_{j not in S} phi*_j phi*_j^H + sum_{k not in Sigma} psi*_k psi*_k^H,
/// so that a^H Q a = ||a||^2_{l2(Phi,S^c)} + ||a||^2_{l2(Psi,Sigma^c)}.
inline CMatrix tail_quadratic_form(const Basis& phi, const Basis& psi, const SupportSet& s, const SupportSet& sigma) {
  detail::check_pair(phi, psi, s, sigma);
  return detail::outside_projector(phi.dual(), s) + detail::outside_projector(psi.dual(), sigma);
}

/// Brackets the smallest valid strong-annihilation constant between
/// 1/(sqrt 2 q) and 1/q with q^2 the smallest eigenvalue of Q.
inline ExactBracket exact_constant_bracket(const Basis& phi, const Basis& psi, const SupportSet& s,
                                           const SupportSet& sigma, double tol = kWeakPairTolerance) {
  const auto eig = linalg::smallest_eigenpair(tail_quadratic_form(phi, psi, s, sigma));
  ExactBracket b;
  b.lambda_min = std::max(0.0, eig.value);
  b.minimizer = eig.vector;
  b.weak_pair = b.lambda_min > tol;
  if (!b.weak_pair) {
    b.lo = b.hi = std::numeric_limits<double>::infinity();
  } else {
    const double q = std::sqrt(b.lambda_min);
    b.lo = 1.0 / (std::numbers::sqrt2 * q);
    b.hi = 1.0 / q;
  }
  return b;
}

/// Constant for normalized, not necessarily orthonormal, bases:
/// D = (alpha(Psi)^2 - |S||Sigma| M(Phi,Psi*)^2 beta(Phi)^2)^{-1/2},
/// C = (1 + D beta(Psi)) / alpha(Phi), minimized over the two role assignments.
inline std::optional<double> general_basis_constant(const Basis& phi, const Basis& psi, const SupportSet& s,
                                                    const SupportSet& sigma) {
  detail::check_pair(phi, psi, s, sigma);
  const double prod = static_cast<double>(s.size() * sigma.size());
  auto one_way = [prod](const Basis& a, const Basis& b) -> std::optional<double> {
    const double m = coherence(a.columns(), b.dual());
    const double gap = b.alpha() * b.alpha() - prod * m * m * a.beta() * a.beta();
    if (gap <= 0.0) return std::nullopt;
    const double dconst = 1.0 / std::sqrt(gap);
    return (1.0 + dconst * b.beta()) / a.alpha();
  };
  const auto c1 = one_way(phi, psi);
  const auto c2 = one_way(psi, phi);
  if (c1 && c2) return std::min(*c1, *c2);
  return c1 ? c1 : c2;
}

/// 2 / (1 - sqrt(s sigma / |G|)) when s sigma < |G|.
inline std::optional<double> group_sup_constant(std::size_t card_g, std::size_t s, std::size_t sigma) {
  if (card_g == 0) throw DomainError("group_sup_constant: empty group");
  const double prod = static_cast<double>(s) * static_cast<double>(sigma);
  if (prod >= static_cast<double>(card_g)) return std::nullopt;
  return 2.0 / (1.0 - std::sqrt(prod / static_cast<double>(card_g)));
}

/// Squares a sum-of-norms group constant into the form used on squared tails
/// when transferring to the short-time transform.
inline std::optional<double> group_sup_squared_constant(std::size_t card_g, std::size_t s, std::size_t sigma) {
  auto c = group_sup_constant(card_g, s, sigma);
  if (!c) return std::nullopt;
  return *c * *c;
}

struct CompressibilityResult {
  bool compressible = true;
  std::optional<std::size_t> first_violation;
};

/// Checks |<a,Phi>|*(j) <= sqrt(2 alpha - 1) C (j+1)^{-alpha} ||a||_2 for all j,
/// with coefficients sorted by decreasing modulus (ties by ascending index).
inline CompressibilityResult compressible_check(const CVector& a, const Basis& phi, double c, double alpha) {
  if (!(c > 0.0)) throw DomainError("compressible_check: C must be > 0");
  if (!(alpha > 0.5)) throw DomainError("compressible_check: alpha must be > 1/2");
  const double norm = a.norm();
  if (norm == 0.0) throw DomainError("compressible_check: undefined for a = 0");
  const CVector coeffs = analysis(a, phi);
  std::vector<std::size_t> order(static_cast<std::size_t>(coeffs.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(coeffs(static_cast<Eigen::Index>(i))) > std::abs(coeffs(static_cast<Eigen::Index>(j)));
  });
  const double prefactor = std::sqrt(2.0 * alpha - 1.0) * c * norm;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double lhs = std::abs(coeffs(static_cast<Eigen::Index>(order[j])));
    const double rhs = prefactor * std::pow(static_cast<double>(j + 1), -alpha);
    if (lhs > rhs * (1.0 + 1e-12)) return {false, j};
  }
  return {true, std::nullopt};
}

/// Smallest C for which `a` is (C, alpha)-compressible in `phi`.
inline double compressibility_level(const CVector& a, const Basis& phi, double alpha) {
  const double norm = a.norm();
  if (norm == 0.0) throw DomainError("compressibility_level: undefined for a = 0");
  RVector mags = analysis(a, phi).cwiseAbs();
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double level = 0.0;
  for (Eigen::Index j = 0; j < mags.size(); ++j) {
    level = std::max(level, mags(j) * std::pow(static_cast<double>(j + 1), alpha));
  }
  return level / (std::sqrt(2.0 * alpha - 1.0) * norm);
}

/// (floor(sqrt d) - 1)^{alpha - 1/2} / (4 sqrt d): below this level no nonzero
/// vector is (C, alpha)-compressible in two unbiased orthonormal bases.
inline double compressibility_threshold(std::size_t d, double alpha) {
  if (d < 4) throw DomainError("compressibility_threshold: requires d >= 4");
  if (!(alpha > 0.5)) throw DomainError("compressibility_threshold: alpha must be > 1/2");
  const double root = std::sqrt(static_cast<double>(d));
  const double k = std::floor(root + 1e-12) - 1.0;
  return std::pow(k, alpha - 0.5) / (4.0 * root);
}

/// Variant for a biased pair of coherence M: (M/4)(floor(1/M) - 1)^{alpha - 1/2}.
inline double compressibility_threshold_biased(double coherence_m, double alpha) {
  if (!(coherence_m > 0.0 && coherence_m <= 1.0)) throw DomainError("coherence must lie in (0, 1]");
  if (!(alpha > 0.5)) throw DomainError("alpha must be > 1/2");
  const double k = std::floor(1.0 / coherence_m + 1e-12) - 1.0;
  return coherence_m / 4.0 * std::pow(std::max(k, 0.0), alpha - 0.5);
}

struct CompressibilitySearch {
  double best_level = std::numeric_limits<double>::infinity();  ///< min over candidates of the joint level
  CVector best;
  std::size_t candidates = 0;
};

/// max of the two single-basis levels: `a` is jointly (C, alpha)-compressible iff this is <= C.
inline double joint_compressibility_level(const CVector& a, const Basis& phi, const Basis& psi, double alpha) {
  return std::max(compressibility_level(a, phi, alpha), compressibility_level(a, psi, alpha));
}

/// Seeded search for the smallest joint compressibility level. Candidates are,
/// in order: structured vectors (Diracs, flat, periodic combs, sampled
/// Gaussians of several widths, quadratic chirps), then random vectors with
/// power-law coefficients in phi, then random perturbations of the incumbent
/// with a shrinking step.
inline CompressibilitySearch joint_compressibility_search(const Basis& phi, const Basis& psi, double alpha,
                                                          std::size_t budget, std::uint64_t seed) {
  const Eigen::Index d = phi.dim();
  CompressibilitySearch out;
  auto consider = [&](const CVector& v) {
    if (out.candidates >= budget || v.norm() == 0.0) return;
    ++out.candidates;
    const CVector a = v / v.norm();
    const double level = joint_compressibility_level(a, phi, psi, alpha);
    if (level < out.best_level) {
      out.best_level = level;
      out.best = a;
    }
  };
  for (Eigen::Index j = 0; j < d && j < 2; ++j) consider(CVector::Unit(d, j));
  consider(CVector::Ones(d));
  for (Eigen::Index step = 2; step < d; ++step) {
    if (d % step) continue;
    CVector comb = CVector::Zero(d);
    for (Eigen::Index j = 0; j < d; j += step) comb(j) = 1.0;
    consider(comb);
  }
  for (int w = 1; w <= 40; ++w) {
    const double width = 0.25 * w;
    CVector g(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double t = static_cast<double>(std::min(j, d - j));
      g(j) = std::exp(-t * t / (2.0 * width * width));
    }
    consider(g);
    for (int c = 1; c <= 4; ++c) {
      CVector chirp(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        const double ph = std::numbers::pi * c * static_cast<double>(j * j) / static_cast<double>(d);
        chirp(j) = g(j) * cplx(std::cos(ph), std::sin(ph));
      }
      consider(chirp);
    }
  }
  const std::size_t random_budget = out.candidates + (budget - std::min(budget, out.candidates)) / 2;
  for (std::uint64_t t = 0; out.candidates < random_budget; ++t) {
    Rng rng(seed, t, Purpose::search);
    CVector coef(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      coef(j) = rng.complex_normal() * std::pow(static_cast<double>(j + 1), -alpha - rng.uniform());
    }
    // Shuffle which basis index carries which coefficient.
    for (Eigen::Index j = d - 1; j > 0; --j) std::swap(coef(j), coef(static_cast<Eigen::Index>(rng.below(static_cast<std::size_t>(j + 1)))));
    consider(synthesis(coef, phi));
  }
  double step = 0.3;
  for (std::uint64_t t = 0; out.candidates < budget; ++t) {
    Rng rng(seed, 1000000 + t, Purpose::search);
    const double before = out.best_level;
    consider(out.best + step * rng.complex_gaussian(d) / std::sqrt(static_cast<double>(d)));
    if (!(out.best_level < before)) step = std::max(step * 0.995, 1e-4);
  }
  return out;
}

/// sqrt((2-p)/p) (floor(sqrt d) - 1)^{1/p - 1/2} / (4 sqrt d).
inline double lp_lower_bound(std::size_t d, double p) {
  if (!(p > 0.0 && p < 2.0)) throw DomainError("lp_lower_bound: p must lie in (0, 2)");
  if (d < 4) throw DomainError("lp_lower_bound: requires d >= 4");
  const double root = std::sqrt(static_cast<double>(d));
  const double k = std::floor(root + 1e-12) - 1.0;
  return std::sqrt((2.0 - p) / p) * std::pow(k, 1.0 / p - 0.5) / (4.0 * root);
}

inline double lp_norm(const CVector& v, double p) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) acc += std::pow(std::abs(v(j)), p);
  return std::pow(acc, 1.0 / p);
}

/// Everything the library can say about one (S, Sigma) pair for two bases.
struct AnnihilationReport {
  double coherence = 0.0;
  double op_norm = 0.0;
  double hs_norm = 0.0;
  std::optional<double> theorem_a_bound;
  std::optional<double> refined_bound;
  double lambda_min = 0.0;
  double exact_constant_lo = 0.0;
  double exact_constant_hi = 0.0;
  bool weak_pair = false;
};

inline AnnihilationReport annihilation_report(const Basis& phi, const Basis& psi, const SupportSet& s,
                                              const SupportSet& sigma, double tol = kWeakPairTolerance) {
  const NormsChain chain = norms_chain(phi, psi, s, sigma);
  const ExactBracket bracket = exact_constant_bracket(phi, psi, s, sigma, tol);
  AnnihilationReport r;
  r.coherence = coherence(phi, psi);
  r.op_norm = chain.op_norm;
  r.hs_norm = chain.hs_norm;
  r.theorem_a_bound = theorem_a_constant(r.coherence, s.size(), sigma.size());
  r.refined_bound = refined_constant_from_norm(chain.op_norm);
  r.lambda_min = bracket.lambda_min;
  r.exact_constant_lo = bracket.lo;
  r.exact_constant_hi = bracket.hi;
  r.weak_pair = bracket.weak_pair;
  return r;
}

}  // namespace annihilator

#endif  // ANNIHILATOR_ANNIHILATION_HPP
