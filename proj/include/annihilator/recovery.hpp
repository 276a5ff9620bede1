#ifndef ANNIHILATOR_RECOVERY_HPP
#define ANNIHILATOR_RECOVERY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "annihilator/annihilation.hpp"
#include "annihilator/common.hpp"
#include "annihilator/linalg.hpp"
#include "annihilator/parallel.hpp"
#include "annihilator/random_ensembles.hpp"
#include "annihilator/rng.hpp"
#include "annihilator/stft.hpp"

namespace annihilator {

struct SolverOptions {
  std::size_t max_iterations = 50000;
  double step = 1.0;                   ///< threshold scale, relative to ||y||_2 / sqrt(rows)
  double feasibility_tolerance = 1e-8;
  double objective_tolerance = 1e-6;
  std::size_t restarts = 3;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 100;
};

/// Shrinks the modulus and keeps the phase: z max(1 - tau/|z|, 0).
inline cplx soft_threshold(cplx z, double tau) {
  const double m = std::abs(z);
  if (m <= tau) return {0.0, 0.0};
  return z * (1.0 - tau / m);
}

/// Projector onto {x : A x = y}, factored once per A so that many right-hand
/// sides can share it.
class AffineConstraint {
 public:
  explicit AffineConstraint(const CMatrix& a, double rank_tol = 1e-10) : a_(a) {
    if (a.rows() == 0 || a.cols() == 0) throw DimensionError("AffineConstraint: empty constraint matrix");
    Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw ConvergenceError("AffineConstraint: SVD did not converge");
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rank_tol * s(0)) ++r;
    u_ = svd.matrixU().leftCols(r);
    v_ = svd.matrixV().leftCols(r);
    inv_s_ = s.head(r).cwiseInverse();
  }

  Eigen::Index unknowns() const noexcept { return a_.cols(); }
  Eigen::Index rows() const noexcept { return a_.rows(); }
  Eigen::Index rank() const noexcept { return v_.cols(); }
  const CMatrix& matrix() const noexcept { return a_; }

  /// Minimum-norm solution of A x = y; throws if y is not in the range of A.
  CVector particular(const CVector& y, double tol) const {
    require_same_size(static_cast<std::size_t>(y.size()), static_cast<std::size_t>(a_.rows()), "constraint rhs");
    CVector x0 = v_ * inv_s_.asDiagonal() * (u_.adjoint() * y);
    const double miss = (a_ * x0 - y).norm();
    if (miss > tol * std::max(1.0, y.norm())) {
      throw DomainError("basis pursuit: y is not in the range of A (residual " + std::to_string(miss) + ")");
    }
    return x0;
  }

  /// Orthogonal projection of z onto {x : A x = y}, given the particular solution.
  CVector project(const CVector& z, const CVector& x0) const { return z - v_ * (v_.adjoint() * z) + x0; }

 private:
  CMatrix a_;
  CMatrix u_;
  CMatrix v_;
  RVector inv_s_;
};

struct BpResult {
  CVector x;
  double l1_objective = 0.0;
  double residual = 0.0;          ///< ||A x - y||_2
  double fixed_point_gap = 0.0;   ///< ||shrink step - projection|| at exit
  std::size_t iterations = 0;
  bool converged = false;
  bool monotone = true;           ///< gap non-increasing over checkpoints
  std::vector<double> checkpoints;
  double restart_spread = 0.0;    ///< max objective minus min objective over converged restarts
};

namespace detail {

/// Douglas-Rachford splitting between the affine set and the complex l1 norm.
/// The gap ||z_{k+1} - z_k|| of this iteration is non-increasing in exact arithmetic.
inline BpResult douglas_rachford(const AffineConstraint& con, const CVector& y, const CVector& x0, CVector z,
                                 const SolverOptions& opts) {
  const double tau =
      opts.step * std::max(y.norm(), 1e-300) / std::sqrt(static_cast<double>(std::max<Eigen::Index>(con.rows(), 1)));
  BpResult r;
  CVector x(z.size()), w(z.size());
  double last_checkpoint = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= opts.max_iterations; ++k) {
    x = con.project(z, x0);
    const CVector reflect = 2.0 * x - z;
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = soft_threshold(reflect(i), tau);
    const double gap = (w - x).norm();
    z += w - x;
    r.iterations = k;
    r.fixed_point_gap = gap;
    if (opts.checkpoint_every && k % opts.checkpoint_every == 0) {
      r.checkpoints.push_back(gap);
      if (gap > last_checkpoint * (1.0 + 1e-9) + 1e-15) r.monotone = false;
      last_checkpoint = gap;
    }
    const double scale = std::max(1.0, x.norm());
    if (gap <= opts.feasibility_tolerance * scale &&
        std::abs(x.lpNorm<1>() - w.lpNorm<1>()) <= opts.objective_tolerance * std::max(1.0, x.lpNorm<1>())) {
      r.converged = true;
      break;
    }
  }
  r.x = con.project(z, x0);
  r.l1_objective = r.x.lpNorm<1>();
  r.residual = (con.matrix() * r.x - y).norm();
  return r;
}

}  // namespace detail

/// Solves min ||x||_1 subject to A x = y from `restarts` seeded starting points
/// and returns the best one. Does not throw on non-convergence.
inline BpResult solve_basis_pursuit(const AffineConstraint& con, const CVector& y, const SolverOptions& opts) {
  if (!(opts.feasibility_tolerance > 0.0 && opts.objective_tolerance > 0.0 && opts.step > 0.0)) {
    throw DomainError("SolverOptions: tolerances and step must be positive");
  }
  const CVector x0 = con.particular(y, 1e-8);
  if (x0.norm() == 0.0) {
    BpResult zero;
    zero.x = CVector::Zero(con.unknowns());
    zero.converged = true;
    return zero;
  }
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  BpResult best;
  bool have = false;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t r = 0; r < restarts; ++r) {
    CVector z0 = x0;
    if (r > 0) {
      Rng rng(opts.seed, r, Purpose::solver);
      z0 += rng.complex_gaussian(con.unknowns()) * (x0.norm() / std::sqrt(static_cast<double>(con.unknowns())));
    }
    BpResult cur = detail::douglas_rachford(con, y, x0, std::move(z0), opts);
    if (cur.converged) {
      lo = std::min(lo, cur.l1_objective);
      hi = std::max(hi, cur.l1_objective);
    }
    const bool better = !have || (cur.converged && !best.converged) ||
                        (cur.converged == best.converged && cur.l1_objective < best.l1_objective);
    if (better) {
      best = std::move(cur);
      have = true;
    }
  }
  best.restart_spread = hi >= lo ? hi - lo : 0.0;
  return best;
}

/// Basis pursuit min ||x||_1 s.t. A x = y. Throws ConvergenceError carrying the
/// final residuals when no restart reaches the tolerances.
inline CVector basis_pursuit_synthesis(const CMatrix& a, const CVector& y, const SolverOptions& opts = {}) {
  const AffineConstraint con(a);
  BpResult r = solve_basis_pursuit(con, y, opts);
  if (!r.converged) {
    throw ConvergenceError("basis pursuit: iteration cap reached", r.fixed_point_gap, r.l1_objective);
  }
  return r.x;
}

struct RecoveryTrial {
  std::size_t trial = 0;
  double residual = 0.0;
  double l1_objective = 0.0;
  double rel_error = 0.0;
  bool converged = false;
};

/// Compressed-sensing instance: x s-sparse in the standard basis, observed
/// through `measurements` random rows of the unitary DFT of size d.
inline RecoveryTrial cs_recovery_trial(std::size_t d, std::size_t sparsity, std::size_t measurements,
                                       std::uint64_t seed, std::size_t trial, SolverOptions opts = {}) {
  if (measurements == 0 || measurements > d) throw DomainError("recover: need 1 <= measurements <= d");
  if (sparsity > d) throw DomainError("recover: sparsity exceeds dimension");
  const GroupSpec spec({static_cast<std::int64_t>(d)});
  const CMatrix f = dft_matrix(spec);
  Rng rows_rng(seed, trial, Purpose::subset);
  const SupportSet rows = random_subset_fixed(d, measurements, rows_rng);
  Rng sup_rng(seed, trial, Purpose::support);
  const SupportSet support = random_subset_fixed(d, sparsity, sup_rng);
  Rng val_rng(seed, trial, Purpose::sparse_signal);
  CVector x = CVector::Zero(static_cast<Eigen::Index>(d));
  for (auto j : support.indices()) x(static_cast<Eigen::Index>(j)) = val_rng.complex_normal();
  CMatrix a(static_cast<Eigen::Index>(measurements), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < measurements; ++r) a.row(static_cast<Eigen::Index>(r)) = f.row(static_cast<Eigen::Index>(rows.indices()[r]));
  const CVector y = a * x;
  opts.seed = seed ^ (0x9e37ULL * (trial + 1));
  const AffineConstraint con(a);
  const BpResult r = solve_basis_pursuit(con, y, opts);
  RecoveryTrial t;
  t.trial = trial;
  t.residual = r.residual;
  t.l1_objective = r.l1_objective;
  t.rel_error = x.norm() > 0 ? (r.x - x).norm() / x.norm() : r.x.norm();
  t.converged = r.converged;
  return t;
}

/// {x * |G| + xi : x not in S, xi in Omega}, flat indices into the Gabor frame.
inline std::vector<std::size_t> tf_index_set(const GroupSpec& spec, const SupportSet& s, const SupportSet& omega) {
  const std::size_t n = spec.cardinality();
  require_same_size(s.dim(), n, "tf_index_set S");
  require_same_size(omega.dim(), n, "tf_index_set Omega");
  std::vector<std::size_t> out;
  for (auto x : s.complement_indices()) {
    for (auto xi : omega.indices()) out.push_back(x * n + xi);
  }
  return out;
}

/// Largest delta with delta d ||f||^2 <= sum_{j in Omega~} |<f, e_j>|^2 for all f.
inline double frame_lower_delta(const CMatrix& frame, const std::vector<std::size_t>& omega_tilde) {
  CMatrix sub(frame.rows(), static_cast<Eigen::Index>(omega_tilde.size()));
  for (std::size_t j = 0; j < omega_tilde.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = frame.col(static_cast<Eigen::Index>(omega_tilde[j]));
  return std::max(0.0, linalg::smallest_eigenvalue(sub * sub.adjoint())) / static_cast<double>(frame.rows());
}

struct Problem41Report {
  std::string label = "exploratory";
  std::size_t d = 0;
  std::size_t omega_size = 0;
  double delta_exact = 0.0;   ///< frame lower bound over all f
  double delta_probe = 0.0;   ///< min over the probe vectors
  std::size_t probes = 0;
  std::vector<RecoveryTrial> trials;
  double success_fraction = 0.0;
  double success_threshold = 1e-4;
};

inline constexpr std::size_t kProblem41Probes = 50;

/// For each trial draws f, then solves
///   min sum_j |<h, e_j>|  subject to  <h, e_j> = <f, e_j> for j in Omega~
/// over the Gabor frame of g, in coefficient form c = E^H h with the range
/// condition (I - E^H E / d) c = 0 added to the constraints.
inline Problem41Report problem_41_experiment(const GroupSpec& spec, const Signal& g,
                                             const std::vector<std::size_t>& omega_tilde, std::size_t trials,
                                             std::uint64_t seed, const SolverOptions& opts = {},
                                             unsigned threads = 1) {
  require_unit_window(g, "problem_41_experiment");
  if (trials == 0) throw DomainError("problem_41_experiment: trials must be >= 1");
  const CMatrix frame = gabor_frame(spec, g);
  const Eigen::Index d = frame.rows();
  const Eigen::Index n_coef = frame.cols();
  std::vector<std::size_t> om = omega_tilde;
  std::sort(om.begin(), om.end());
  if (std::adjacent_find(om.begin(), om.end()) != om.end()) throw DomainError("Omega~ has duplicates");
  for (auto j : om) {
    if (j >= static_cast<std::size_t>(n_coef)) throw DomainError("Omega~ index out of range");
  }

  Problem41Report rep;
  rep.d = static_cast<std::size_t>(d);
  rep.omega_size = om.size();
  rep.delta_exact = frame_lower_delta(frame, om);
  rep.probes = kProblem41Probes;
  rep.delta_probe = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < kProblem41Probes; ++p) {
    Rng rng(seed, p, Purpose::probe);
    const CVector f = rng.unit_vector(d);
    const CVector c = frame.adjoint() * f;
    double on = 0.0;
    for (auto j : om) on += std::norm(c(static_cast<Eigen::Index>(j)));
    rep.delta_probe = std::min(rep.delta_probe, on / static_cast<double>(d));
  }

  const auto m = static_cast<Eigen::Index>(om.size());
  CMatrix a = CMatrix::Zero(n_coef + m, n_coef);
  a.topRows(n_coef) = CMatrix::Identity(n_coef, n_coef) - frame.adjoint() * frame / static_cast<double>(d);
  for (Eigen::Index r = 0; r < m; ++r) a(n_coef + r, static_cast<Eigen::Index>(om[static_cast<std::size_t>(r)])) = 1.0;
  const AffineConstraint con(a);

  rep.trials.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(seed, t, Purpose::vector);
    const CVector f = rng.complex_gaussian(d);
    const CVector c = frame.adjoint() * f;
    CVector y = CVector::Zero(n_coef + m);
    for (Eigen::Index r = 0; r < m; ++r) y(n_coef + r) = c(static_cast<Eigen::Index>(om[static_cast<std::size_t>(r)]));
    SolverOptions o = opts;
    o.seed = seed ^ (0x51ULL * (t + 1));
    const BpResult r = solve_basis_pursuit(con, y, o);
    const CVector fhat = frame * r.x / static_cast<double>(d);
    RecoveryTrial& tr = rep.trials[t];
    tr.trial = t;
    tr.residual = r.residual;
    tr.l1_objective = r.l1_objective;
    tr.rel_error = (fhat - f).norm() / f.norm();
    tr.converged = r.converged;
  });
  std::size_t ok = 0;
  for (const auto& tr : rep.trials) ok += tr.rel_error < rep.success_threshold;
  rep.success_fraction = static_cast<double>(ok) / static_cast<double>(trials);
  return rep;
}

}  // namespace annihilator

#endif  // ANNIHILATOR_RECOVERY_HPP
