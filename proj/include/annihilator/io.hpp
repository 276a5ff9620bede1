#ifndef ANNIHILATOR_IO_HPP
#define ANNIHILATOR_IO_HPP

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "annihilator/annihilation.hpp"
#include "annihilator/basis.hpp"
#include "annihilator/common.hpp"
#include "annihilator/random_ensembles.hpp"
#include "annihilator/recovery.hpp"

namespace annihilator::io {

using json = nlohmann::ordered_json;

/// Finite reals as numbers, infinities as the strings "infinity" / "-infinity".
inline json real(double v) {
  if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
  if (std::isnan(v)) return "nan";
  return v;
}

inline json optional_real(const std::optional<double>& v) { return v ? real(*v) : json(nullptr); }

inline double parse_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-infinity") return -std::numeric_limits<double>::infinity();
  }
  throw ParseError("expected a number or \"infinity\"");
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("complex entries must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json signal_to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline CVector signal_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("signal must be a JSON array of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline json basis_to_json(const CMatrix& columns) {
  json cols = json::array();
  for (Eigen::Index c = 0; c < columns.cols(); ++c) cols.push_back(signal_to_json(columns.col(c)));
  return json{{"dim", columns.rows()}, {"columns", cols}};
}

inline json basis_to_json(const Basis& b) { return basis_to_json(b.columns()); }

/// Loads {"dim", "columns"} and runs the Basis invariants; a failure names the
/// invariant through InvariantError ("dim" when the shape disagrees with "dim").
inline Basis basis_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("columns")) {
    throw ParseError("basis JSON needs \"dim\" and \"columns\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<std::int64_t>() < 1) throw ParseError("\"dim\" must be a positive integer");
  const auto d = j["dim"].get<std::int64_t>();
  const json& cols = j["columns"];
  if (!cols.is_array()) throw ParseError("\"columns\" must be an array");
  if (static_cast<std::int64_t>(cols.size()) != d) {
    throw InvariantError("dim", "expected " + std::to_string(d) + " columns, got " + std::to_string(cols.size()));
  }
  CMatrix m(d, d);
  for (std::int64_t c = 0; c < d; ++c) {
    const CVector v = signal_from_json(cols[static_cast<std::size_t>(c)]);
    if (v.size() != d) {
      throw InvariantError("dim", "column " + std::to_string(c) + " has length " + std::to_string(v.size()));
    }
    m.col(c) = v;
  }
  return Basis(std::move(m));
}

inline Basis load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open basis file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("basis file ") + path + ": " + e.what());
  }
  return basis_from_json(j);
}

inline json indices_json(const std::vector<std::size_t>& v) { return json(v); }

inline json to_json(const AnnihilationReport& r) {
  return json{{"coherence", real(r.coherence)},
              {"op_norm", real(r.op_norm)},
              {"hs_norm", real(r.hs_norm)},
              {"theorem_a_bound", optional_real(r.theorem_a_bound)},
              {"refined_bound", optional_real(r.refined_bound)},
              {"lambda_min", real(r.lambda_min)},
              {"exact_constant_lo", real(r.exact_constant_lo)},
              {"exact_constant_hi", real(r.exact_constant_hi)},
              {"weak_pair", r.weak_pair}};
}

inline const char* method_name(RipMethod m) { return m == RipMethod::exhaustive ? "exhaustive" : "sampled"; }

inline json to_json(const RipReport& r) {
  return json{{"delta_s", real(r.delta_s)},
              {"s", r.s},
              {"omega_size", r.omega_size},
              {"method", method_name(r.method)},
              {"supports_examined", r.supports_examined},
              {"worst_support", indices_json(r.worst_support)}};
}

inline json to_json(const RvTrial& t) {
  return json{{"trial", t.trial},        {"omega_size", t.omega_size}, {"s_size", t.s_size},
              {"lhs", real(t.lhs)},      {"rhs", real(t.rhs)},         {"constant", real(t.constant)},
              {"violated", t.violated},  {"exact_hi", real(t.exact_hi)}, {"certified", t.certified}};
}

inline json to_json(const RvReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials) trials.push_back(to_json(t));
  return json{{"d", r.d},
              {"eta", real(r.config.eta)},
              {"t", real(r.config.t)},
              {"s", r.config.s},
              {"k", real(r.k)},
              {"trials_run", r.trials.size()},
              {"violation_rate", real(r.violation_rate)},
              {"certified_rate", real(r.certified_rate)},
              {"omega_mean", real(r.omega_mean)},
              {"omega_min", r.omega_min},
              {"omega_max", r.omega_max},
              {"omega_within_sqrt_tk", real(r.omega_within_sqrt_tk)},
              {"rv2_constant", real(r.rv2_constant)},
              {"trials", trials}};
}

inline json to_json(const BtResult& r) {
  return json{{"sigma", indices_json(r.sigma.indices())},
              {"sigma_size", r.sigma.size()},
              {"lambda_min_gram", real(r.lambda_min_gram)},
              {"gram_floor", real(kBtGramFloor)},
              {"max_column_norm_error", real(r.max_column_norm_error)},
              {"operator_norm_sq", real(r.operator_norm_sq)}};
}

inline json to_json(const BtCertificate& c) {
  return json{{"constant", real(c.constant)},
              {"max_ratio", real(c.max_ratio)},
              {"exact_hi", real(c.exact_hi)},
              {"proof_constant", real(c.proof_constant)},
              {"vectors", c.vectors},
              {"holds", c.holds}};
}

inline json to_json(const RecoveryTrial& t) {
  return json{{"trial", t.trial},
              {"residual", real(t.residual)},
              {"l1_objective", real(t.l1_objective)},
              {"rel_error", real(t.rel_error)},
              {"converged", t.converged}};
}

inline json to_json(const Problem41Report& r) {
  json trials = json::array();
  for (const auto& t : r.trials) trials.push_back(to_json(t));
  return json{{"label", r.label},
              {"d", r.d},
              {"omega_size", r.omega_size},
              {"delta_exact", real(r.delta_exact)},
              {"delta_probe", real(r.delta_probe)},
              {"probes", r.probes},
              {"success_threshold", real(r.success_threshold)},
              {"success_fraction", real(r.success_fraction)},
              {"trials", trials}};
}

/// Shortest decimal that round-trips, so CSV and JSON agree digit for digit.
inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
  if (std::isnan(v)) return "nan";
  return json(v).dump();
}

inline void write_recovery_csv(std::ostream& out, const std::vector<RecoveryTrial>& trials) {
  out << "trial,residual,l1_objective,rel_error,converged\n";
  for (const auto& t : trials) {
    out << t.trial << ',' << format_real(t.residual) << ',' << format_real(t.l1_objective) << ','
        << format_real(t.rel_error) << ',' << (t.converged ? "true" : "false") << '\n';
  }
}

}  // namespace annihilator::io

#endif  // ANNIHILATOR_IO_HPP
