#ifndef ANNIHILATOR_RANDOM_ENSEMBLES_HPP
#define ANNIHILATOR_RANDOM_ENSEMBLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "annihilator/annihilation.hpp"
#include "annihilator/basis.hpp"
#include "annihilator/common.hpp"
#include "annihilator/linalg.hpp"
#include "annihilator/rng.hpp"

namespace annihilator {

/// Each index of {0..d-1} is kept independently with probability k/d.
struct RandomSetModel {
  std::size_t d = 0;
  double k = 0.0;
  std::uint64_t seed = 0;
};

inline SupportSet random_subset_avg_card(const RandomSetModel& model, std::uint64_t trial = 0) {
  if (model.k < 0.0 || model.k > static_cast<double>(model.d)) {
    throw DomainError("random_subset_avg_card: need 0 <= k <= d");
  }
  Rng rng(model.seed, trial, Purpose::subset);
  const double p = model.d ? model.k / static_cast<double>(model.d) : 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < model.d; ++j) {
    // Draw for every index so the stream position never depends on p.
    const double u = rng.uniform();
    if (u < p) idx.push_back(j);
  }
  return SupportSet(std::move(idx), model.d);
}

/// Uniformly random subset of exactly `size` indices (partial Fisher-Yates).
inline SupportSet random_subset_fixed(std::size_t d, std::size_t size, Rng& rng) {
  if (size > d) throw DomainError("random_subset_fixed: size exceeds dimension");
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + rng.below(d - i);
    std::swap(all[i], all[j]);
  }
  all.resize(size);
  return SupportSet(std::move(all), d);
}

/// The unitary DFT matrix T_{kj} = d^{-1/2} exp(-2 pi i kj/d), rows indexed by frequency.
inline CMatrix dft_matrix(const GroupSpec& spec) { return fourier_basis(spec).columns().adjoint(); }

enum class RipMethod { exhaustive, sampled };

struct RipReport {
  double delta_s = 0.0;
  std::size_t s = 0;
  std::size_t omega_size = 0;
  RipMethod method = RipMethod::exhaustive;
  std::size_t supports_examined = 0;
  std::vector<std::size_t> worst_support;
};

inline constexpr double kMaxExhaustiveSupports = 2e5;

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

namespace detail {

/// max(sigma_max^2 d/|Omega| - 1, 1 - sigma_min^2 d/|Omega|), clamped to [0, 1].
inline double rip_deviation(const CMatrix& t, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                            double scale) {
  CMatrix sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          t(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    }
  }
  const auto sv = linalg::extreme_singular_values(sub);
  const double upper = sv.max * sv.max * scale - 1.0;
  const double lower = 1.0 - sv.min * sv.min * scale;
  return std::clamp(std::max(upper, lower), 0.0, 1.0);
}

}  // namespace detail

/// Restricted isometry constant of the rows Omega of a unitary T over
/// s-column supports. Exhaustive mode is exact; sampled mode examines
/// `samples` random supports and is a lower bound.
inline RipReport rip_constant(const CMatrix& t, const SupportSet& omega, std::size_t s, RipMethod method,
                              std::size_t samples = 1000, std::uint64_t seed = 0) {
  if (t.rows() != t.cols()) throw DimensionError("rip_constant: T must be square");
  const auto d = static_cast<std::size_t>(t.cols());
  require_same_size(omega.dim(), d, "rip_constant Omega");
  if (omega.empty()) throw DomainError("rip_constant: Omega is empty");
  if (s == 0 || s > d) throw DomainError("rip_constant: need 1 <= s <= d");
  RipReport rep;
  rep.s = s;
  rep.omega_size = omega.size();
  rep.method = method;
  const double scale = static_cast<double>(d) / static_cast<double>(omega.size());
  double worst = -1.0;
  auto consider = [&](const std::vector<std::size_t>& cols) {
    const double dev = detail::rip_deviation(t, omega.indices(), cols, scale);
    ++rep.supports_examined;
    if (dev > worst) {
      worst = dev;
      rep.worst_support = cols;
    }
  };
  if (method == RipMethod::exhaustive) {
    if (binomial(d, s) > kMaxExhaustiveSupports) {
      throw DomainError("rip_constant: C(d, s) exceeds 2e5 supports in exhaustive mode");
    }
    std::vector<std::size_t> cols(s);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    while (true) {
      consider(cols);
      std::size_t i = s;
      while (i > 0 && cols[i - 1] == d - s + (i - 1)) --i;
      if (i == 0) break;
      ++cols[i - 1];
      for (std::size_t j = i; j < s; ++j) cols[j] = cols[j - 1] + 1;
    }
  } else {
    if (samples == 0) throw DomainError("rip_constant: sampled mode needs a positive trial count");
    for (std::size_t trial = 0; trial < samples; ++trial) {
      Rng rng(seed, trial, Purpose::support);
      consider(random_subset_fixed(d, s, rng).indices());
    }
  }
  rep.delta_s = std::max(worst, 0.0);
  return rep;
}

/// 1 + sqrt(d / ((1 - delta_s) |Omega|)): constant for the pairs (S, Omega^c), |S| = s.
inline double uup_to_annihilation(double delta_s, std::size_t omega_size, std::size_t d) {
  if (!(delta_s < 1.0) || delta_s < 0.0) throw DomainError("uup_to_annihilation: need 0 <= delta_s < 1");
  if (omega_size == 0) throw DomainError("uup_to_annihilation: Omega is empty");
  return 1.0 + std::sqrt(static_cast<double>(d) / ((1.0 - delta_s) * static_cast<double>(omega_size)));
}

/// delta_s = 1 - (1/C) (1/(1 - |Sigma|/d)).
inline double annihilation_to_uup(double c_sigma, std::size_t sigma_size, std::size_t d) {
  if (sigma_size >= d) throw DomainError("annihilation_to_uup: need |Sigma| < d");
  if (!(c_sigma >= 1.0)) throw DomainError("annihilation_to_uup: need C >= 1");
  return 1.0 - (1.0 / c_sigma) / (1.0 - static_cast<double>(sigma_size) / static_cast<double>(d));
}

struct RvConfig {
  double eta = 0.5;
  double t = 2.0;
  std::size_t s = 1;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<double> k;  ///< average |Omega|; defaults to d/2
};

struct RvTrial {
  std::size_t trial = 0;
  std::size_t omega_size = 0;
  std::size_t s_size = 0;
  double lhs = 0.0;       ///< ||a||_2
  double rhs = 0.0;       ///< constant * (tails)
  double constant = 0.0;  ///< 1 + sqrt(d/(eta |Omega|)), infinite for empty Omega
  bool violated = false;
  double exact_hi = 0.0;  ///< 1/q for (S, Omega^c); infinite when not a weak pair
  bool certified = false; ///< exact_hi <= constant, i.e. the inequality holds for every a
};

struct RvReport {
  RvConfig config;
  std::size_t d = 0;
  double k = 0.0;
  std::vector<RvTrial> trials;
  double violation_rate = 0.0;
  double certified_rate = 0.0;
  double omega_mean = 0.0;
  std::size_t omega_min = 0;
  std::size_t omega_max = 0;
  double omega_within_sqrt_tk = 0.0;  ///< fraction with k - sqrt(tk) <= |Omega| <= k + sqrt(tk)
  double rv2_constant = 0.0;          ///< 2 / sqrt(eta)
};

/// One instance of ||a|| <= (1 + sqrt(d/(eta |Omega|))) (||a||_{Phi,S^c} + ||a||_{Psi,Omega}).
inline RvTrial rv_trial(const Basis& phi, const Basis& psi, const SupportSet& s, const SupportSet& omega,
                        const CVector& a, double eta) {
  const auto d = static_cast<std::size_t>(phi.dim());
  RvTrial r;
  r.omega_size = omega.size();
  r.s_size = s.size();
  // Sigma = Omega^c, so the Psi tail outside Sigma is the energy on Omega.
  const SupportSet sigma = omega.complement();
  const TailNorms tails = tail_norms(a, phi, psi, s, sigma);
  r.lhs = a.norm();
  if (omega.empty()) {
    r.constant = std::numeric_limits<double>::infinity();
    r.rhs = r.constant;
  } else {
    r.constant = 1.0 + std::sqrt(static_cast<double>(d) / (eta * static_cast<double>(omega.size())));
    r.rhs = r.constant * tails.sum();
  }
  r.violated = r.lhs > r.rhs + 1e-12 * std::max(1.0, r.lhs);
  const ExactBracket b = exact_constant_bracket(phi, psi, s, sigma);
  r.exact_hi = b.hi;
  r.certified = b.weak_pair && b.hi <= r.constant;
  return r;
}

inline RvReport rv_experiment(const RvConfig& config, const Basis& phi, const Basis& psi) {
  if (!(config.eta > 0.0 && config.eta < 1.0)) throw DomainError("rv_experiment: eta must lie in (0, 1)");
  if (!(config.t > 1.0)) throw DomainError("rv_experiment: t must be > 1");
  if (config.trials == 0) throw DomainError("rv_experiment: trials must be >= 1");
  const auto d = static_cast<std::size_t>(phi.dim());
  require_same_size(d, static_cast<std::size_t>(psi.dim()), "rv_experiment");
  if (config.s > d) throw DomainError("rv_experiment: s exceeds dimension");
  RvReport rep;
  rep.config = config;
  rep.d = d;
  rep.k = config.k.value_or(static_cast<double>(d) / 2.0);
  rep.rv2_constant = 2.0 / std::sqrt(config.eta);
  rep.trials.resize(config.trials);
  for (std::size_t i = 0; i < config.trials; ++i) {
    const SupportSet omega = random_subset_avg_card({d, rep.k, config.seed}, i);
    Rng srng(config.seed, i, Purpose::support);
    const SupportSet s = random_subset_fixed(d, config.s, srng);
    Rng arng(config.seed, i, Purpose::vector);
    const CVector a = arng.unit_vector(phi.dim());
    rep.trials[i] = rv_trial(phi, psi, s, omega, a, config.eta);
    rep.trials[i].trial = i;
  }
  std::size_t violations = 0, certified = 0, within = 0;
  double sum = 0.0;
  rep.omega_min = std::numeric_limits<std::size_t>::max();
  const double spread = std::sqrt(config.t * rep.k);
  for (const auto& t : rep.trials) {
    violations += t.violated;
    certified += t.certified;
    sum += static_cast<double>(t.omega_size);
    rep.omega_min = std::min(rep.omega_min, t.omega_size);
    rep.omega_max = std::max(rep.omega_max, t.omega_size);
    const double w = static_cast<double>(t.omega_size);
    within += (w >= rep.k - spread && w <= rep.k + spread);
  }
  const double n = static_cast<double>(config.trials);
  rep.violation_rate = static_cast<double>(violations) / n;
  rep.certified_rate = static_cast<double>(certified) / n;
  rep.omega_mean = sum / n;
  rep.omega_within_sqrt_tk = static_cast<double>(within) / n;
  return rep;
}

enum class BtMode { greedy, exhaustive };

inline constexpr double kBtGramFloor = 1.0 / 144.0;
inline constexpr std::size_t kBtExhaustiveMax = 12;

struct BtResult {
  SupportSet sigma;                 ///< selected subset of S, as indices into {0..d-1}
  double lambda_min_gram = 0.0;     ///< smallest eigenvalue of the selected columns' Gram
  double max_column_norm_error = 0.0;
  double operator_norm_sq = 0.0;    ///< ||T||^2, at most d/n for unbiased bases
  CMatrix t;                        ///< the n x n matrix, columns indexed by S
};

/// T(l, k) = sqrt(d/n) <phi_{j_k}, psi_{omega_l}>.
inline CMatrix bt_matrix(const Basis& phi, const Basis& psi, const SupportSet& s, const SupportSet& omega) {
  const std::size_t n = s.size();
  const double scale = std::sqrt(static_cast<double>(phi.dim()) / static_cast<double>(n));
  CMatrix t(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      t(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) =
          scale * psi.columns().col(static_cast<Eigen::Index>(omega.indices()[l]))
                      .dot(phi.columns().col(static_cast<Eigen::Index>(s.indices()[k])));
    }
  }
  return t;
}

namespace detail {

inline double gram_lambda_min(const CMatrix& t, const std::vector<std::size_t>& cols) {
  if (cols.empty()) return std::numeric_limits<double>::infinity();
  CMatrix sub(t.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = t.col(static_cast<Eigen::Index>(cols[c]));
  return linalg::smallest_eigenvalue(sub.adjoint() * sub);
}

}  // namespace detail

/// Selects sigma in S whose columns of T have Gram smallest eigenvalue >= 1/144.
/// Greedy adds, at each step, the column giving the largest resulting
/// eigenvalue (lowest index on ties); exhaustive (n <= 12) returns a largest
/// admissible subset, preferring the larger eigenvalue among equal sizes.
inline BtResult bt_restricted_invertibility(const Basis& phi, const Basis& psi, const SupportSet& s,
                                            const SupportSet& omega, BtMode mode = BtMode::greedy) {
  require_same_size(static_cast<std::size_t>(phi.dim()), static_cast<std::size_t>(psi.dim()), "bt basis pair");
  require_same_size(s.dim(), static_cast<std::size_t>(phi.dim()), "bt S");
  require_same_size(omega.dim(), static_cast<std::size_t>(phi.dim()), "bt Omega");
  if (s.empty()) throw DomainError("bt_restricted_invertibility: S is empty");
  if (s.size() != omega.size()) throw DomainError("bt_restricted_invertibility: need |S| = |Omega|");
  const std::size_t n = s.size();
  BtResult res;
  res.t = bt_matrix(phi, psi, s, omega);
  for (Eigen::Index k = 0; k < res.t.cols(); ++k) {
    res.max_column_norm_error = std::max(res.max_column_norm_error, std::abs(res.t.col(k).norm() - 1.0));
  }
  res.operator_norm_sq = std::pow(linalg::operator_norm(res.t), 2);

  std::vector<std::size_t> chosen;
  double chosen_lambda = std::numeric_limits<double>::infinity();
  if (mode == BtMode::greedy) {
    std::vector<bool> used(n, false);
    while (chosen.size() < n) {
      double best = -1.0;
      std::size_t best_k = n;
      for (std::size_t k = 0; k < n; ++k) {
        if (used[k]) continue;
        auto trial = chosen;
        trial.push_back(k);
        const double lam = detail::gram_lambda_min(res.t, trial);
        if (lam > best) {
          best = lam;
          best_k = k;
        }
      }
      if (best < kBtGramFloor) break;
      used[best_k] = true;
      chosen.push_back(best_k);
      chosen_lambda = best;
    }
  } else {
    if (n > kBtExhaustiveMax) throw DomainError("bt_restricted_invertibility: exhaustive mode needs n <= 12");
    double best_lambda = -1.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::vector<std::size_t> cols;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (1u << k)) cols.push_back(k);
      }
      if (cols.size() < chosen.size()) continue;
      const double lam = detail::gram_lambda_min(res.t, cols);
      if (lam < kBtGramFloor) continue;
      if (cols.size() > chosen.size() || lam > best_lambda) {
        chosen = cols;
        best_lambda = lam;
      }
    }
    chosen_lambda = best_lambda;
  }
  std::vector<std::size_t> sigma;
  for (auto k : chosen) sigma.push_back(s.indices()[k]);
  res.sigma = SupportSet(std::move(sigma), s.dim());
  res.lambda_min_gram = chosen.empty() ? 0.0 : chosen_lambda;
  return res;
}

/// ceil((d - |Sigma|)^2 / (240 d)), the guaranteed size of sigma.
inline std::size_t bt_guaranteed_size(std::size_t d, std::size_t sigma_size) {
  const double n = static_cast<double>(d - sigma_size);
  return static_cast<std::size_t>(std::ceil(n * n / (240.0 * static_cast<double>(d)) - 1e-12));
}

/// 13 / sqrt(1 - |Sigma|/d).
inline double bt_constant(std::size_t d, std::size_t sigma_size) {
  if (sigma_size >= d) throw DomainError("bt_constant: need |Sigma| < d");
  return 13.0 / std::sqrt(1.0 - static_cast<double>(sigma_size) / static_cast<double>(d));
}

struct BtCertificate {
  double constant = 0.0;   ///< 13 / sqrt(1 - |Sigma|/d)
  double max_ratio = 0.0;  ///< max ||a|| / (tails) over the sampled vectors
  double exact_hi = 0.0;   ///< 1/q for (sigma, Sigma); up to sqrt 2 above the true constant
  double proof_constant = 0.0;  ///< 1 + sqrt(d / (n lambda_min)), valid for every a
  std::size_t vectors = 0;
  bool holds = false;
};

/// Checks ||a|| <= 13/sqrt(1-|Sigma|/d) (||a||_{Phi,sigma^c} + ||a||_{Psi,Sigma^c})
/// with Sigma = Omega^c, on `vectors` random a and through the exact bracket.
///
/// For a with Phi-support in sigma, ||P_Omega a|| >= sqrt(n lambda / d) ||a||, which
/// splits into ||a|| <= (1 + sqrt(d/(n lambda))) (tails) for every a.
inline BtCertificate bt_certificate(const Basis& phi, const Basis& psi, const SupportSet& sigma_sel,
                                    const SupportSet& omega, double lambda_min_gram, std::size_t vectors,
                                    std::uint64_t seed, std::uint64_t trial = 0) {
  const auto d = static_cast<std::size_t>(phi.dim());
  const SupportSet big_sigma = omega.complement();
  BtCertificate c;
  c.constant = bt_constant(d, big_sigma.size());
  c.vectors = vectors;
  bool ok = true;
  for (std::size_t i = 0; i < vectors; ++i) {
    Rng rng(seed, trial * 1000003ULL + i, Purpose::probe);
    const CVector a = rng.unit_vector(phi.dim());
    const double tails = tail_norms(a, phi, psi, sigma_sel, big_sigma).sum();
    const double ratio = tails > 0.0 ? a.norm() / tails : std::numeric_limits<double>::infinity();
    c.max_ratio = std::max(c.max_ratio, ratio);
    ok = ok && a.norm() <= c.constant * tails + 1e-9;
  }
  const ExactBracket b = exact_constant_bracket(phi, psi, sigma_sel, big_sigma);
  c.exact_hi = b.hi;
  c.proof_constant = lambda_min_gram > 0.0
                         ? 1.0 + std::sqrt(static_cast<double>(d) /
                                           (static_cast<double>(omega.size()) * lambda_min_gram))
                         : std::numeric_limits<double>::infinity();
  c.holds = ok && b.weak_pair && std::min(b.hi, c.proof_constant) <= c.constant;
  return c;
}

}  // namespace annihilator

#endif  // ANNIHILATOR_RANDOM_ENSEMBLES_HPP
