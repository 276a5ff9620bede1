#ifndef ANNIHILATOR_CLI_HPP
#define ANNIHILATOR_CLI_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "annihilator/annihilation.hpp"
#include "annihilator/basis.hpp"
#include "annihilator/group.hpp"
#include "annihilator/io.hpp"
#include "annihilator/parallel.hpp"
#include "annihilator/random_ensembles.hpp"
#include "annihilator/recovery.hpp"
#include "annihilator/stft.hpp"
#include "annihilator/verify.hpp"

namespace annihilator {

inline constexpr const char* kToolVersion = "0.1.0";

/// Bad command line: unknown subcommand, unparsable argument, unwritable output.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string subcommand;
  std::string group;        ///< "8", "2x3x5"; empty selects the default list for verify
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::string format = "json";
  std::string output;       ///< empty writes to stdout

  // Tolerance overrides.
  std::optional<double> weak_pair_tolerance;
  std::optional<double> feasibility_tolerance;
  std::optional<double> objective_tolerance;
  std::optional<std::size_t> max_iterations;

  // constants
  std::string pair = "fourier";  ///< fourier | random | files
  std::string phi_path;
  std::string psi_path;
  std::string S;
  std::string Sigma;

  // stft-up, problem41
  std::string window = "random";  ///< random | delta | flat
  double sigma_frac = 0.5;
  double omega_frac = 0.75;

  // rip
  std::string omega;
  std::size_t s = 1;
  std::string mode = "exhaustive";
  std::size_t samples = 1000;

  // rv, bt, recover
  std::size_t d = 0;
  std::size_t n = 0;
  double eta = 0.5;
  double t = 2.0;
  std::optional<double> k;
  std::size_t sparsity = 2;
  std::size_t measurements = 16;

  // verify
  std::size_t draws = 10;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"verify", "constants", "stft-up", "rip",
                                                 "rv",     "bt",        "recover", "problem41"};
  return names;
}

namespace detail {

struct Output {
  io::json report;
  std::string csv;  ///< used when format is csv
  bool invariant_violation = false;
};

inline io::json config_echo(const RunConfig& c) {
  io::json j{{"subcommand", c.subcommand}, {"seed", c.seed}, {"trials", c.trials}, {"format", c.format}};
  if (!c.group.empty()) j["group"] = c.group;
  if (c.weak_pair_tolerance) j["weak_pair_tolerance"] = *c.weak_pair_tolerance;
  if (c.feasibility_tolerance) j["feasibility_tolerance"] = *c.feasibility_tolerance;
  if (c.objective_tolerance) j["objective_tolerance"] = *c.objective_tolerance;
  if (c.max_iterations) j["max_iterations"] = *c.max_iterations;
  const std::string& sc = c.subcommand;
  if (sc == "verify") j["draws"] = c.draws;
  if (sc == "constants") {
    j["pair"] = c.pair;
    j["S"] = c.S;
    j["Sigma"] = c.Sigma;
    if (!c.phi_path.empty()) j["phi"] = c.phi_path;
    if (!c.psi_path.empty()) j["psi"] = c.psi_path;
  }
  if (sc == "stft-up") {
    j["window"] = c.window;
    j["sigma_frac"] = c.sigma_frac;
  }
  if (sc == "problem41") {
    j["window"] = c.window;
    j["omega_frac"] = c.omega_frac;
    if (!c.S.empty()) j["S"] = c.S;
    if (!c.omega.empty()) j["omega"] = c.omega;
  }
  if (sc == "rip") {
    j["omega"] = c.omega;
    j["s"] = c.s;
    j["mode"] = c.mode;
    j["samples"] = c.samples;
  }
  if (sc == "rv") {
    j["d"] = c.d;
    j["s"] = c.s;
    j["eta"] = c.eta;
    j["t"] = c.t;
    if (c.k) j["k"] = *c.k;
  }
  if (sc == "bt") {
    j["d"] = c.d;
    j["n"] = c.n;
    j["mode"] = c.mode;
  }
  if (sc == "recover") {
    j["d"] = c.d;
    j["sparsity"] = c.sparsity;
    j["measurements"] = c.measurements;
  }
  return j;
}

inline GroupSpec require_group(const RunConfig& c) {
  if (c.group.empty()) throw UsageError(c.subcommand + ": --group is required");
  try {
    return GroupSpec::parse(c.group);
  } catch (const ParseError& e) {
    throw UsageError(std::string("malformed group spec: ") + e.what());
  }
}

inline SupportSet parse_support(const std::string& text, std::size_t dim, const char* what) {
  try {
    return SupportSet::parse(text, dim);
  } catch (const Error& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

inline SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  if (c.feasibility_tolerance) o.feasibility_tolerance = *c.feasibility_tolerance;
  if (c.objective_tolerance) o.objective_tolerance = *c.objective_tolerance;
  if (c.max_iterations) o.max_iterations = *c.max_iterations;
  if (!(o.feasibility_tolerance > 0.0 && o.objective_tolerance > 0.0 && o.max_iterations > 0)) {
    throw UsageError("solver tolerances and iteration cap must be positive");
  }
  return o;
}

inline Signal make_window(const GroupSpec& spec, const std::string& kind, Rng& rng) {
  const Eigen::Index n = spec.dim();
  if (kind == "random") return rng.unit_vector(n);
  if (kind == "delta") {
    Signal g = Signal::Zero(n);
    g(0) = 1.0;
    return g;
  }
  if (kind == "flat") return Signal::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  throw UsageError("unknown window '" + kind + "' (random, delta, flat)");
}

inline std::string csv_key_values(const io::json& obj) {
  std::ostringstream out;
  out << "field,value\n";
  for (const auto& [key, value] : obj.items()) {
    if (value.is_array() || value.is_object()) continue;
    out << key << ',';
    if (value.is_string()) {
      out << value.get<std::string>();
    } else if (value.is_null()) {
      out << "";
    } else {
      out << value.dump();
    }
    out << '\n';
  }
  return out.str();
}

inline Output run_verify(const RunConfig& c) {
  VerifyOptions opt;
  opt.seed = c.seed;
  opt.draws = c.draws;
  opt.groups = c.group.empty() ? default_verify_groups() : std::vector<GroupSpec>{require_group(c)};
  const VerifyReport rep = verify_all(opt);
  Output out;
  out.report = io::to_json(rep);
  out.invariant_violation = !rep.passed();
  std::ostringstream csv;
  csv << "module,name,passed,max_deviation,tolerance,instances\n";
  for (const auto& s : rep.suites) {
    csv << s.module << ',' << s.name << ',' << (s.passed ? "true" : "false") << ',' << io::format_real(s.max_deviation)
        << ',' << io::format_real(s.tolerance) << ',' << s.instances << '\n';
  }
  out.csv = csv.str();
  return out;
}

inline Output run_constants(const RunConfig& c) {
  const GroupSpec spec = require_group(c);
  const auto d = spec.dim();
  std::optional<Basis> phi, psi;
  if (c.pair == "fourier") {
    phi.emplace(standard_basis(d));
    psi.emplace(fourier_basis(spec));
  } else if (c.pair == "random") {
    Rng a(c.seed, 0, Purpose::basis_phi), b(c.seed, 0, Purpose::basis_psi);
    phi.emplace(random_orthonormal_basis(d, a));
    psi.emplace(random_orthonormal_basis(d, b));
  } else if (c.pair == "files") {
    if (c.phi_path.empty() || c.psi_path.empty()) throw UsageError("--pair files needs --phi and --psi");
    phi.emplace(io::load_basis(c.phi_path));
    psi.emplace(io::load_basis(c.psi_path));
    if (phi->dim() != d || psi->dim() != d) throw UsageError("basis dimension differs from |G|");
  } else {
    throw UsageError("unknown pair '" + c.pair + "' (fourier, random, files)");
  }
  const auto n = static_cast<std::size_t>(d);
  const SupportSet S = parse_support(c.S, n, "--S");
  const SupportSet Sigma = parse_support(c.Sigma, n, "--Sigma");
  const AnnihilationReport r = annihilation_report(*phi, *psi, S, Sigma, c.weak_pair_tolerance.value_or(kWeakPairTolerance));
  Output out;
  out.report = io::to_json(r);
  const auto eb = elad_bruckstein_bound(*phi, *psi);
  out.report["S"] = S.indices();
  out.report["Sigma"] = Sigma.indices();
  out.report["general_basis_constant"] = io::optional_real(general_basis_constant(*phi, *psi, S, Sigma));
  out.report["group_sup_constant"] = io::optional_real(group_sup_constant(n, S.size(), Sigma.size()));
  out.report["elad_bruckstein_product"] = io::real(eb.product);
  out.report["elad_bruckstein_sum"] = io::real(eb.sum);
  out.csv = csv_key_values(out.report);
  return out;
}

inline Output run_stft_up(const RunConfig& c) {
  const GroupSpec spec = require_group(c);
  const std::size_t n = spec.cardinality();
  if (!(c.sigma_frac >= 0.0 && c.sigma_frac < 1.0)) throw UsageError("--Sigma-frac must lie in [0, 1)");
  const auto card = static_cast<std::size_t>(std::floor(c.sigma_frac * static_cast<double>(n)));
  const double bound = *stft_up_constant(card, n, StftForm::squared);
  const double norm_bound = *stft_up_constant(card, n, StftForm::norm);
  struct Row {
    double lhs, rhs, ratio;
    bool ok;
  };
  std::vector<Row> rows(c.trials);
  parallel_for(c.trials, thread_cap(), [&](std::size_t t) {
    Rng wr(c.seed, t, Purpose::window);
    const Signal g = make_window(spec, c.window, wr);
    Rng fr(c.seed, t, Purpose::vector);
    const Signal f = fr.complex_gaussian(spec.dim());
    Rng sr(c.seed, t, Purpose::support);
    const TFSupport sigma(spec, random_subset_fixed(n * n, card, sr).indices());
    const double tail = tail_energy(stft(spec, f, g), sigma);
    const double lhs = f.squaredNorm();
    const bool ok = lhs <= bound * tail + 1e-9 && std::sqrt(lhs) <= norm_bound * std::sqrt(tail) + 1e-9;
    rows[t] = {lhs, tail, tail > 0.0 ? lhs / tail : std::numeric_limits<double>::infinity(), ok};
  });
  Output out;
  io::json trials = io::json::array();
  std::ostringstream csv;
  csv << "trial,lhs,rhs,ratio,bound\n";
  double max_ratio = 0.0;
  std::size_t violations = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const Row& r = rows[t];
    trials.push_back({{"trial", t}, {"lhs", io::real(r.lhs)}, {"rhs", io::real(r.rhs)}, {"ratio", io::real(r.ratio)}, {"bound", io::real(bound)}});
    csv << t << ',' << io::format_real(r.lhs) << ',' << io::format_real(r.rhs) << ',' << io::format_real(r.ratio) << ','
        << io::format_real(bound) << '\n';
    max_ratio = std::max(max_ratio, r.ratio);
    violations += !r.ok;
  }
  out.report = {{"sigma_size", card},
                {"group_size", n},
                {"bound", io::real(bound)},
                {"norm_bound", io::real(norm_bound)},
                {"max_ratio", io::real(max_ratio)},
                {"violations", violations},
                {"trials", trials}};
  out.csv = csv.str();
  out.invariant_violation = violations > 0;
  return out;
}

inline Output run_rip(const RunConfig& c) {
  const GroupSpec spec = require_group(c);
  const std::size_t n = spec.cardinality();
  const SupportSet omega = parse_support(c.omega, n, "--omega");
  RipMethod m;
  if (c.mode == "exhaustive") m = RipMethod::exhaustive;
  else if (c.mode == "sampled") m = RipMethod::sampled;
  else throw UsageError("unknown mode '" + c.mode + "' (exhaustive, sampled)");
  RipReport r;
  try {
    r = rip_constant(dft_matrix(spec), omega, c.s, m, c.samples, c.seed);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Output out;
  out.report = io::to_json(r);
  out.report["omega"] = omega.indices();
  out.report["annihilation_constant"] =
      r.delta_s < 1.0 ? io::real(uup_to_annihilation(r.delta_s, omega.size(), n)) : io::json(nullptr);
  out.csv = csv_key_values(out.report);
  return out;
}

inline Output run_rv(const RunConfig& c) {
  if (c.d == 0) throw UsageError("rv: --d is required");
  const GroupSpec spec({static_cast<std::int64_t>(c.d)});
  RvConfig cfg;
  cfg.eta = c.eta;
  cfg.t = c.t;
  cfg.s = c.s;
  cfg.trials = c.trials;
  cfg.seed = c.seed;
  cfg.k = c.k;
  RvReport r;
  try {
    r = rv_experiment(cfg, standard_basis(spec.dim()), fourier_basis(spec));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Output out;
  out.report = io::to_json(r);
  std::ostringstream csv;
  csv << "trial,omega_size,s_size,lhs,rhs,constant,violated,exact_hi,certified\n";
  for (const auto& t : r.trials) {
    csv << t.trial << ',' << t.omega_size << ',' << t.s_size << ',' << io::format_real(t.lhs) << ','
        << io::format_real(t.rhs) << ',' << io::format_real(t.constant) << ',' << (t.violated ? "true" : "false") << ','
        << io::format_real(t.exact_hi) << ',' << (t.certified ? "true" : "false") << '\n';
  }
  out.csv = csv.str();
  return out;
}

inline Output run_bt(const RunConfig& c) {
  if (c.d == 0 || c.n == 0 || c.n > c.d) throw UsageError("bt: need 1 <= --n <= --d");
  const GroupSpec spec({static_cast<std::int64_t>(c.d)});
  const Basis phi = standard_basis(spec.dim());
  const Basis psi = fourier_basis(spec);
  Rng rng(c.seed, 0, Purpose::support);
  const SupportSet S = random_subset_fixed(c.d, c.n, rng);
  const SupportSet omega = random_subset_fixed(c.d, c.n, rng);
  BtMode mode;
  if (c.mode == "greedy") mode = BtMode::greedy;
  else if (c.mode == "exhaustive") mode = BtMode::exhaustive;
  else throw UsageError("unknown mode '" + c.mode + "' (greedy, exhaustive)");
  BtResult r;
  try {
    r = bt_restricted_invertibility(phi, psi, S, omega, mode);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const std::size_t sigma_size = c.d - c.n;
  const BtCertificate cert = bt_certificate(phi, psi, r.sigma, omega, r.lambda_min_gram, 100, c.seed);
  const std::size_t guaranteed = bt_guaranteed_size(c.d, sigma_size);
  Output out;
  out.report = io::to_json(r);
  out.report["S"] = S.indices();
  out.report["omega"] = omega.indices();
  out.report["guaranteed_size"] = guaranteed;
  out.report["certificate"] = io::to_json(cert);
  out.invariant_violation = r.lambda_min_gram < kBtGramFloor || r.sigma.size() < guaranteed || !cert.holds;
  io::json flat = out.report;
  flat.erase("certificate");
  flat["certificate_holds"] = cert.holds;
  flat["certificate_constant"] = io::real(cert.constant);
  out.csv = csv_key_values(flat);
  return out;
}

inline Output run_recover(const RunConfig& c) {
  if (c.d == 0) throw UsageError("recover: --d is required");
  const SolverOptions opts = solver_options(c);
  std::vector<RecoveryTrial> trials(c.trials);
  try {
    parallel_for(c.trials, thread_cap(), [&](std::size_t t) {
      trials[t] = cs_recovery_trial(c.d, c.sparsity, c.measurements, c.seed, t, opts);
    });
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  std::size_t ok = 0;
  io::json arr = io::json::array();
  for (const auto& t : trials) {
    ok += t.rel_error < 1e-4;
    arr.push_back(io::to_json(t));
  }
  Output out;
  out.report = {{"d", c.d},
                {"sparsity", c.sparsity},
                {"measurements", c.measurements},
                {"success_threshold", 1e-4},
                {"successes", ok},
                {"success_fraction", io::real(static_cast<double>(ok) / static_cast<double>(c.trials))},
                {"trials", arr}};
  std::ostringstream csv;
  io::write_recovery_csv(csv, trials);
  out.csv = csv.str();
  return out;
}

inline Output run_problem41(const RunConfig& c) {
  const GroupSpec spec = require_group(c);
  const std::size_t n = spec.cardinality();
  Rng wr(c.seed, 0, Purpose::window);
  const Signal g = make_window(spec, c.window, wr);
  std::vector<std::size_t> omega_tilde;
  if (!c.S.empty() || !c.omega.empty()) {
    omega_tilde = tf_index_set(spec, parse_support(c.S, n, "--S"), parse_support(c.omega, n, "--omega"));
  } else {
    if (!(c.omega_frac > 0.0 && c.omega_frac <= 1.0)) throw UsageError("--omega-frac must lie in (0, 1]");
    const auto size = static_cast<std::size_t>(std::llround(c.omega_frac * static_cast<double>(n * n)));
    Rng sr(c.seed, 0, Purpose::subset);
    omega_tilde = random_subset_fixed(n * n, size, sr).indices();
  }
  if (omega_tilde.empty()) throw UsageError("problem41: the constraint set is empty");
  const Problem41Report r = problem_41_experiment(spec, g, omega_tilde, c.trials, c.seed, solver_options(c), thread_cap());
  Output out;
  out.report = io::to_json(r);
  out.report["omega_tilde"] = omega_tilde;
  std::ostringstream csv;
  io::write_recovery_csv(csv, r.trials);
  out.csv = csv.str();
  return out;
}

inline Output dispatch(const RunConfig& c) {
  if (c.subcommand == "verify") return run_verify(c);
  if (c.subcommand == "constants") return run_constants(c);
  if (c.subcommand == "stft-up") return run_stft_up(c);
  if (c.subcommand == "rip") return run_rip(c);
  if (c.subcommand == "rv") return run_rv(c);
  if (c.subcommand == "bt") return run_bt(c);
  if (c.subcommand == "recover") return run_recover(c);
  if (c.subcommand == "problem41") return run_problem41(c);
  throw UsageError("unknown subcommand '" + c.subcommand + "'");
}

}  // namespace detail

/// Renders the report for `config` as it would be written (JSON envelope or CSV body).
/// Throws UsageError for bad configurations.
inline std::string render(const RunConfig& config, bool* invariant_violation = nullptr) {
  if (config.trials == 0) throw UsageError("--trials must be >= 1");
  if (config.format != "json" && config.format != "csv") throw UsageError("--out must be json or csv");
  detail::Output out = detail::dispatch(config);
  if (invariant_violation) *invariant_violation = out.invariant_violation;
  if (config.format == "csv") return out.csv;
  io::json env{{"tool", "annihilator"},
               {"version", kToolVersion},
               {"command", config.subcommand},
               {"seed", config.seed},
               {"config", detail::config_echo(config)},
               {"report", out.report}};
  return env.dump(2) + "\n";
}

/// Runs one subcommand and writes its report. Exit status: 0 success,
/// 1 invariant violation, 2 usage error. The wall-clock duration goes to `err`
/// so the report itself stays byte-reproducible.
inline int run(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const auto start = std::chrono::steady_clock::now();
  std::string text;
  bool violation = false;
  try {
    text = render(config, &violation);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << '\n';
    return 1;
  } catch (const std::logic_error& e) {
    err << "invariant violation: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (config.output.empty() || config.output == "-") {
    out << text;
    out.flush();
  } else {
    std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
    if (!file || !(file << text) || !file.flush()) {
      err << "usage error: cannot write output file " << config.output << '\n';
      return 2;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "annihilator " << config.subcommand << ": " << (violation ? "invariant violation" : "ok") << " in " << secs
      << " s\n";
  return violation ? 1 : 0;
}

}  // namespace annihilator

#endif  // ANNIHILATOR_CLI_HPP
