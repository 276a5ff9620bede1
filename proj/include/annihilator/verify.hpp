#ifndef ANNIHILATOR_VERIFY_HPP
#define ANNIHILATOR_VERIFY_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annihilator/annihilation.hpp"
#include "annihilator/basis.hpp"
#include "annihilator/group.hpp"
#include "annihilator/io.hpp"
#include "annihilator/random_ensembles.hpp"
#include "annihilator/recovery.hpp"
#include "annihilator/stft.hpp"

namespace annihilator {

using DftFunction = std::function<Signal(const GroupSpec&, const Signal&)>;

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::vector<GroupSpec> groups;  ///< an empty list yields an empty report
  std::size_t draws = 10;         ///< random draws per group and identity
  DftFunction dft_under_test;     ///< defaults to the library dft
};

inline std::vector<GroupSpec> default_verify_groups() {
  std::vector<GroupSpec> g;
  for (int n = 2; n <= 8; ++n) g.emplace_back(std::vector<std::int64_t>{n});
  g.push_back(GroupSpec::parse("2x2"));
  g.push_back(GroupSpec::parse("2x3"));
  g.push_back(GroupSpec::parse("2x4"));
  g.push_back(GroupSpec::parse("3x3"));
  return g;
}

struct SuiteResult {
  std::string module;
  std::string name;
  bool passed = true;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::size_t instances = 0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<std::string> groups;
  std::vector<SuiteResult> suites;

  bool passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
  }
  const SuiteResult* find(const std::string& name) const {
    for (const auto& s : suites) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

namespace detail {

class SuiteBook {
 public:
  void add(const std::string& module, const std::string& name, double tol, double deviation) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, suites_.size()).first;
      suites_.push_back({module, name, true, 0.0, tol, 0});
    }
    SuiteResult& s = suites_[it->second];
    ++s.instances;
    if (std::isnan(deviation)) {
      s.max_deviation = std::numeric_limits<double>::infinity();
    } else {
      s.max_deviation = std::max(s.max_deviation, deviation);
    }
    s.passed = s.max_deviation <= s.tolerance;
  }

  /// Records an instance that threw: the suite fails with an infinite deviation.
  template <class F>
  void guard(const std::string& module, const std::string& name, double tol, F&& f) {
    try {
      f();
    } catch (const std::exception&) {
      add(module, name, tol, std::numeric_limits<double>::infinity());
    }
  }

  std::vector<SuiteResult> take() { return std::move(suites_); }

 private:
  std::vector<SuiteResult> suites_;
  std::map<std::string, std::size_t> index_;
};

inline double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

inline SupportSet random_support(std::size_t d, std::size_t size, Rng& rng) { return random_subset_fixed(d, size, rng); }

/// A normalized but non-orthonormal basis: columns of I + 0.3 G, normalized.
inline Basis skewed_basis(Eigen::Index d, Rng& rng) {
  CMatrix m = CMatrix::Identity(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) += 0.3 * rng.complex_normal();
  }
  for (Eigen::Index j = 0; j < d; ++j) m.col(j).normalize();
  return Basis(std::move(m));
}

inline void group_suites(SuiteBook& book, const GroupSpec& spec, std::size_t gi, const VerifyOptions& opt) {
  const auto n = static_cast<Eigen::Index>(spec.cardinality());
  const std::size_t nn = spec.cardinality();
  const DftFunction& fdft = opt.dft_under_test;
  for (std::size_t t = 0; t < opt.draws; ++t) {
    const std::uint64_t trial = gi * 100000 + t;
    Rng rng(opt.seed, trial, Purpose::vector);
    const Signal f = rng.complex_gaussian(n);
    const double fn = f.norm();

    // group_core
    book.guard("group_core", "dft_unitarity", 1e-12, [&] {
      book.add("group_core", "dft_unitarity", 1e-12, rel(std::abs(fdft(spec, f).norm() - fn), fn));
    });
    book.guard("group_core", "dft_round_trip", 1e-12, [&] {
      const double a = (idft(spec, fdft(spec, f)) - f).norm();
      const double b = (dft(spec, idft(spec, f)) - f).norm();
      book.add("group_core", "dft_round_trip", 1e-12, rel(std::max(a, b), fn));
    });
    book.add("group_core", "dft_fast_path", 1e-12,
             rel((dft(spec, f, TransformPath::factorized) - dft(spec, f, TransformPath::direct)).norm(), fn));
    {
      const std::size_t xi = rng.below(nn), eta = rng.below(nn), x = rng.below(nn), y = rng.below(nn);
      const auto X = spec.element_at<TimeTag>(x), Y = spec.element_at<TimeTag>(y);
      const auto XI = spec.element_at<FrequencyTag>(xi), ETA = spec.element_at<FrequencyTag>(eta);
      const double d1 = std::abs(character(spec, spec.add(XI, ETA), X) - character(spec, XI, X) * character(spec, ETA, X));
      const double d2 = std::abs(character(spec, XI, spec.add(X, Y)) - character(spec, XI, X) * character(spec, XI, Y));
      const double d3 = std::abs(character(spec, spec.negate(XI), X) - std::conj(character(spec, XI, X)));
      book.add("group_core", "character_bilinearity", 1e-14, std::max({d1, d2, d3}));
    }

    // bases
    book.guard("bases", "dual_of_dual", 1e-9, [&] {
      Rng brng(opt.seed, trial, Purpose::basis_phi);
      const Basis b = skewed_basis(n, brng);
      book.add("bases", "dual_of_dual", 1e-9, (dual_columns(dual_columns(b.columns())) - b.columns()).cwiseAbs().maxCoeff());
      const CMatrix bio = b.columns().adjoint() * b.dual();
      book.add("bases", "dual_biorthogonality", 1e-10, (bio - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
      const CVector c = analysis(f, b);
      const double an = c.norm();
      book.add("bases", "riesz_sandwich", 1e-10,
               std::max({0.0, b.alpha() * fn - an, an - b.beta() * fn}) / fn);
      book.add("bases", "analysis_synthesis_round_trip", 1e-10, rel((synthesis(c, b) - f).norm(), fn));
      const bool ok_skew = !b.orthonormal() && b.alpha() <= 1.0 + 1e-12 && b.beta() >= 1.0 - 1e-12;
      const Basis u = random_orthonormal_basis(n, brng);
      const bool ok_unit = u.orthonormal() && std::abs(u.alpha() - 1.0) < 1e-10 && std::abs(u.beta() - 1.0) < 1e-10;
      book.add("bases", "orthonormal_detection", 0.0, (n == 1 || ok_skew) && ok_unit ? 0.0 : 1.0);
    });

    // annihilation on the standard/Fourier pair and a random orthonormal pair
    book.guard("annihilation", "theorem_a_certificate", 1e-9, [&] {
      Rng prng(opt.seed, trial, Purpose::basis_psi);
      const Basis std_b = standard_basis(n);
      const Basis four = fourier_basis(spec);
      const Basis r1 = random_orthonormal_basis(n, prng);
      const Basis r2 = random_orthonormal_basis(n, prng);
      const std::pair<const Basis*, const Basis*> pairs[] = {{&std_b, &four}, {&r1, &r2}};
      for (const auto& [phi, psi] : pairs) {
        const double m = coherence(*phi, *psi);
        Rng srng(opt.seed, trial, Purpose::support);
        std::size_t s = 1 + srng.below(nn), sg = 1 + srng.below(nn);
        while (m * std::sqrt(static_cast<double>(s * sg)) >= 1.0 && (s > 0 || sg > 0)) {
          if (s >= sg && s > 0) --s;
          else --sg;
        }
        const SupportSet S = random_support(nn, s, srng);
        const SupportSet Sg = random_support(nn, sg, srng);
        const auto ta = theorem_a_constant(m, s, sg);
        const NormsChain chain = norms_chain(*phi, *psi, S, Sg);
        const auto refined = refined_constant_from_norm(chain.op_norm);
        const ExactBracket br = exact_constant_bracket(*phi, *psi, S, Sg);
        book.add("annihilation", "cs2_chain", 1e-9,
                 std::max({0.0, chain.op_norm - chain.hs_norm, chain.hs_norm - chain.coherence_bound}));
        if (ta && refined) book.add("annihilation", "refinement_order", 1e-9, std::max(0.0, *refined - *ta));
        double worst_a = 0.0, worst_hi = 0.0;
        for (std::size_t i = 0; i < 200; ++i) {
          Rng arng(opt.seed, trial * 1000 + i, Purpose::probe);
          const CVector a = arng.unit_vector(n);
          const double tails = tail_norms(a, *phi, *psi, S, Sg).sum();
          if (ta) worst_a = std::max(worst_a, 1.0 - *ta * tails);
          if (br.weak_pair) worst_hi = std::max(worst_hi, 1.0 - br.hi * tails);
        }
        if (ta) book.add("annihilation", "theorem_a_certificate", 1e-9, worst_a);
        if (br.weak_pair) {
          const TailNorms w = tail_norms(br.minimizer, *phi, *psi, S, Sg);
          // The eigenvector must violate the constant lo / 1.0001.
          const double witness = std::max(0.0, (br.lo / 1.0001) * w.sum() - br.minimizer.norm() + 1e-12);
          book.add("annihilation", "bracket_validity", 1e-9, std::max(worst_hi, witness));
        }

        // Lemma 2.1 on a vector sparse in Phi.
        const std::size_t k = 1 + srng.below(nn);
        const SupportSet supp = random_support(nn, k, srng);
        CVector coef = CVector::Zero(n);
        for (auto j : supp.indices()) coef(static_cast<Eigen::Index>(j)) = srng.complex_normal();
        const CVector a = synthesis(coef, *phi);
        const double prod = static_cast<double>(support_l0(a, *phi).count * support_l0(a, *psi).count);
        book.add("annihilation", "lemma_2_1", 0.0, std::max(0.0, elad_bruckstein_bound(*phi, *psi).product - prod - 1e-9));
      }
    });

    // stft
    book.guard("stft", "stft_identities", 1e-10, [&] {
      Rng grng(opt.seed, trial, Purpose::window);
      const Signal g = grng.complex_gaussian(n);
      const Signal h = grng.complex_gaussian(n);
      const Signal k = grng.complex_gaussian(n);
      const TFArray v = stft(spec, f, g);
      book.add("stft", "stft_energy", 1e-10, std::abs(v.norm() - fn * g.norm()));
      book.add("stft", "stft_inversion", 1e-10, (stft_inverse(v, g) - f).norm());
      book.add("stft", "symmetry_lemma", 1e-10, symmetry_lemma_check(spec, f, g, h, k));
      const auto a = spec.element_at<TimeTag>(grng.below(nn)), b = spec.element_at<TimeTag>(grng.below(nn));
      const auto u = spec.element_at<FrequencyTag>(grng.below(nn)), w = spec.element_at<FrequencyTag>(grng.below(nn));
      book.add("stft", "covariance", 1e-10, covariance_check(spec, f, g, a, u, b, w));
      book.add("stft", "fundstft", 1e-10, fundstft_check(spec, f, g));
      const double zero_norm = stft(spec, Signal::Zero(n), g).norm();
      const bool nonvanishing = v.norm() > 0.0 && zero_norm == 0.0;
      book.add("stft", "nonvanishing", 0.0, nonvanishing ? 0.0 : 1.0);

      const Signal gu = g / g.norm();
      const TFArray vu = stft(spec, f, gu);
      const std::size_t card = grng.below(nn);
      std::vector<std::size_t> pts = random_subset_fixed(nn * nn, card, grng).indices();
      const TFSupport sigma(spec, pts);
      const double tail = tail_energy(vu, sigma);
      const double c33 = *stft_up_constant(card, nn, StftForm::squared);
      const double cb = *stft_up_constant(card, nn, StftForm::norm);
      book.add("stft", "corollary_3_3", 1e-9, std::max(0.0, fn * fn - c33 * tail));
      book.add("stft", "theorem_b", 1e-9, std::max(0.0, fn - cb * std::sqrt(tail)));
      const double piped = transfer_constant(*group_sup_squared_constant(nn * nn, card, card));
      book.add("stft", "transfer_pipeline", 1e-9, std::abs(piped - c33) / c33);
      const CMatrix frame = gabor_frame(spec, gu);
      book.add("stft", "gabor_tight_frame", 1e-10,
               rel(std::abs(frame_energy(frame, f) - static_cast<double>(nn) * fn * fn), fn * fn * static_cast<double>(nn)));
      const TFSupport back = untilde_support(tilde_support(sigma));
      book.add("stft", "tilde_involution", 0.0, back == sigma && tilde_support(sigma).size() == sigma.size() ? 0.0 : 1.0);
    });
  }
}

inline void global_suites(SuiteBook& book, const VerifyOptions& opt) {
  // Tao: prime d, all (S, Sigma) with |S| + |Sigma| <= d.
  book.guard("annihilation", "tao_prime", 0.0, [&] {
    for (int p : {2, 3, 5, 7}) {
      const GroupSpec spec({p});
      const Basis e = standard_basis(p);
      const Basis four = fourier_basis(spec);
      double failures = 0.0;
      for (std::uint32_t ms = 0; ms < (1u << p); ++ms) {
        for (std::uint32_t mg = 0; mg < (1u << p); ++mg) {
          if (std::popcount(ms) + std::popcount(mg) > p) continue;
          std::vector<std::size_t> s, g;
          for (int j = 0; j < p; ++j) {
            if (ms & (1u << j)) s.push_back(static_cast<std::size_t>(j));
            if (mg & (1u << j)) g.push_back(static_cast<std::size_t>(j));
          }
          const SupportSet S(s, static_cast<std::size_t>(p)), G(g, static_cast<std::size_t>(p));
          if (!(linalg::smallest_eigenvalue(tail_quadratic_form(e, four, S, G)) > 1e-10)) failures += 1.0;
        }
      }
      book.add("annihilation", "tao_prime", 0.0, failures);
    }
  });

  // eq:uup two-sidedness re-verified on 20 random supports.
  book.guard("random_ensembles", "uup_two_sidedness", 1e-10, [&] {
    const GroupSpec spec({8});
    const CMatrix t = dft_matrix(spec);
    Rng rng(opt.seed, 0, Purpose::subset);
    const SupportSet omega = random_subset_fixed(8, 4, rng);
    const RipReport rep = rip_constant(t, omega, 2, RipMethod::exhaustive);
    const double scale = static_cast<double>(omega.size()) / 8.0;
    for (std::size_t i = 0; i < 20; ++i) {
      Rng srng(opt.seed, i, Purpose::support);
      const SupportSet s = random_subset_fixed(8, 2, srng);
      CMatrix sub(static_cast<Eigen::Index>(omega.size()), 2);
      for (std::size_t r = 0; r < omega.size(); ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
          sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              t(static_cast<Eigen::Index>(omega.indices()[r]), static_cast<Eigen::Index>(s.indices()[c]));
        }
      }
      const auto sv = linalg::extreme_singular_values(sub);
      const double lo = (1.0 - rep.delta_s) * scale, hi = (1.0 + rep.delta_s) * scale;
      book.add("random_ensembles", "uup_two_sidedness", 1e-10,
               std::max({0.0, lo - sv.min * sv.min, sv.max * sv.max - hi}));
    }
  });

  book.guard("random_ensembles", "conversion_monotonicity", 0.0, [&] {
    const std::size_t d = 16, omega = 8;
    double prev = -1.0, bad = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double delta = 0.09 * i;
      const double c = uup_to_annihilation(delta, omega, d);
      const double back = annihilation_to_uup(c, d - omega, d);
      if (!(back > prev) || !(back < 1.0)) bad += 1.0;
      prev = back;
    }
    book.add("random_ensembles", "conversion_monotonicity", 0.0, bad);
  });

  book.guard("random_ensembles", "bt_column_norms", 1e-10, [&] {
    const GroupSpec spec({16});
    const Basis e = standard_basis(16);
    const Basis four = fourier_basis(spec);
    Rng rng(opt.seed, 0, Purpose::support);
    const SupportSet s = random_subset_fixed(16, 8, rng);
    const SupportSet omega = random_subset_fixed(16, 8, rng);
    const BtResult r = bt_restricted_invertibility(e, four, s, omega);
    book.add("random_ensembles", "bt_column_norms", 1e-10, r.max_column_norm_error);
    book.add("random_ensembles", "bt_gram_floor", 0.0, std::max(0.0, kBtGramFloor - r.lambda_min_gram));
    book.add("random_ensembles", "bt_operator_norm", 1e-10, std::max(0.0, r.operator_norm_sq - 16.0 / 8.0));
  });

  book.guard("random_ensembles", "determinism", 0.0, [&] {
    const GroupSpec spec({16});
    const Basis e = standard_basis(16);
    const Basis four = fourier_basis(spec);
    RvConfig cfg;
    cfg.s = 2;
    cfg.trials = 5;
    cfg.seed = opt.seed;
    const auto a = io::to_json(rv_experiment(cfg, e, four)).dump();
    const auto b = io::to_json(rv_experiment(cfg, e, four)).dump();
    book.add("random_ensembles", "determinism", 0.0, a == b ? 0.0 : 1.0);
  });

  // Basis pursuit on small compressed-sensing instances with known feasible x.
  book.guard("recovery", "bp_feasibility", 1e-8, [&] {
    const std::size_t d = 16, m = 10;
    const GroupSpec spec({static_cast<std::int64_t>(d)});
    const CMatrix f = dft_matrix(spec);
    for (std::size_t t = 0; t < 3; ++t) {
      Rng rng(opt.seed, t, Purpose::sparse_signal);
      const SupportSet rows = random_subset_fixed(d, m, rng);
      const SupportSet supp = random_subset_fixed(d, 2, rng);
      CMatrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
      for (std::size_t r = 0; r < m; ++r) a.row(static_cast<Eigen::Index>(r)) = f.row(static_cast<Eigen::Index>(rows.indices()[r]));
      CVector x = CVector::Zero(static_cast<Eigen::Index>(d));
      for (auto j : supp.indices()) x(static_cast<Eigen::Index>(j)) = rng.complex_normal();
      const CVector y = a * x;
      SolverOptions so;
      so.seed = opt.seed + t;
      const AffineConstraint con(a);
      const BpResult r1 = solve_basis_pursuit(con, y, so);
      const BpResult r2 = solve_basis_pursuit(con, y, so);
      book.add("recovery", "bp_feasibility", so.feasibility_tolerance, r1.residual / std::max(1.0, y.norm()));
      book.add("recovery", "bp_objective_sanity", so.objective_tolerance,
               std::max(0.0, r1.l1_objective - x.lpNorm<1>()));
      book.add("recovery", "bp_monotone", 0.0, r1.monotone ? 0.0 : 1.0);
      book.add("recovery", "bp_determinism", 0.0, r1.x == r2.x ? 0.0 : 1.0);
    }
  });
}

}  // namespace detail

/// Runs every invariant suite on the configured groups. Never throws for a
/// failing identity; failures are recorded with their deviation.
inline VerifyReport verify_all(VerifyOptions opt) {
  if (!opt.dft_under_test) {
    opt.dft_under_test = [](const GroupSpec& s, const Signal& f) { return dft(s, f); };
  }
  VerifyReport rep;
  rep.seed = opt.seed;
  if (opt.groups.empty()) return rep;
  detail::SuiteBook book;
  for (std::size_t gi = 0; gi < opt.groups.size(); ++gi) {
    rep.groups.push_back(opt.groups[gi].to_string());
    detail::group_suites(book, opt.groups[gi], gi, opt);
  }
  detail::global_suites(book, opt);
  rep.suites = book.take();
  return rep;
}

namespace io {

inline json to_json(const SuiteResult& s) {
  return json{{"module", s.module},
              {"name", s.name},
              {"passed", s.passed},
              {"max_deviation", real(s.max_deviation)},
              {"tolerance", real(s.tolerance)},
              {"instances", s.instances}};
}

inline json to_json(const VerifyReport& r) {
  json suites = json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  return json{{"seed", r.seed}, {"groups", r.groups}, {"passed", r.passed()}, {"suites", suites}};
}

}  // namespace io

}  // namespace annihilator

#endif  // ANNIHILATOR_VERIFY_HPP
