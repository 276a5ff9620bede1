#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "annihilator/cli.hpp"

namespace {

void common_options(CLI::App* sub, annihilator::RunConfig& c) {
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--out", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("-o,--output", c.output, "Output file (stdout when omitted)");
}

void trials_option(CLI::App* sub, annihilator::RunConfig& c) {
  sub->add_option("--trials", c.trials, "Number of trials")->check(CLI::PositiveNumber);
}

void solver_options(CLI::App* sub, annihilator::RunConfig& c) {
  sub->add_option("--feasibility-tol", c.feasibility_tolerance, "Basis pursuit feasibility tolerance");
  sub->add_option("--objective-tol", c.objective_tolerance, "Basis pursuit objective tolerance");
  sub->add_option("--max-iterations", c.max_iterations, "Basis pursuit iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
  annihilator::RunConfig c;
  CLI::App app{"Finite-dimensional uncertainty principles: constants, certificates and experiments"};
  app.set_version_flag("--version", annihilator::kToolVersion);
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "Run every invariant suite");
  verify->add_option("--group", c.group, "Group spec, e.g. 6 or 2x3 (default: the standard list)");
  verify->add_option("--draws", c.draws, "Random draws per group and identity")->check(CLI::PositiveNumber);
  common_options(verify, c);

  auto* constants = app.add_subcommand("constants", "Annihilating-pair report for (S, Sigma)");
  constants->add_option("--group", c.group, "Group spec")->required();
  constants->add_option("--pair", c.pair, "fourier | random | files");
  constants->add_option("--phi", c.phi_path, "Basis JSON for Phi (with --pair files)");
  constants->add_option("--psi", c.psi_path, "Basis JSON for Psi (with --pair files)");
  constants->add_option("--S", c.S, "Comma-separated indices");
  constants->add_option("--Sigma", c.Sigma, "Comma-separated indices");
  constants->add_option("--tol", c.weak_pair_tolerance, "Weak-pair eigenvalue tolerance");
  common_options(constants, c);

  auto* stft_up = app.add_subcommand("stft-up", "Empirical STFT uncertainty ratios");
  stft_up->add_option("--group", c.group, "Group spec")->required();
  stft_up->add_option("--window", c.window, "random | delta | flat");
  stft_up->add_option("--Sigma-frac", c.sigma_frac, "|Sigma| / |G|");
  trials_option(stft_up, c);
  common_options(stft_up, c);

  auto* rip = app.add_subcommand("rip", "Restricted isometry constant of DFT rows");
  rip->add_option("--group", c.group, "Group spec")->required();
  rip->add_option("--omega", c.omega, "Row indices")->required();
  rip->add_option("--s", c.s, "Sparsity")->required();
  rip->add_option("--mode", c.mode, "exhaustive | sampled");
  rip->add_option("--samples", c.samples, "Supports examined in sampled mode");
  common_options(rip, c);

  auto* rv = app.add_subcommand("rv", "Rudelson-Vershynin inequality experiment");
  rv->add_option("--d", c.d, "Dimension")->required();
  rv->add_option("--s", c.s, "Size of S");
  rv->add_option("--eta", c.eta, "eta in (0, 1)");
  rv->add_option("--t", c.t, "Concentration parameter t > 1");
  rv->add_option("--k", c.k, "Average |Omega| (default d/2)");
  trials_option(rv, c);
  common_options(rv, c);

  auto* bt = app.add_subcommand("bt", "Restricted invertibility certificate");
  bt->add_option("--d", c.d, "Dimension")->required();
  bt->add_option("--n", c.n, "|S| = |Omega|")->required();
  bt->add_option("--mode", c.mode, "greedy | exhaustive");
  common_options(bt, c);

  auto* recover = app.add_subcommand("recover", "Compressed-sensing recovery by basis pursuit");
  recover->add_option("--d", c.d, "Dimension")->required();
  recover->add_option("--sparsity", c.sparsity, "Nonzeros in the signal");
  recover->add_option("--measurements", c.measurements, "Number of DFT rows observed");
  trials_option(recover, c);
  solver_options(recover, c);
  common_options(recover, c);

  auto* p41 = app.add_subcommand("problem41", "Gabor-analysis l1 recovery experiment (exploratory)");
  p41->add_option("--group", c.group, "Group spec")->required();
  p41->add_option("--omega-frac", c.omega_frac, "|Omega~| / |G|^2 for a random constraint set");
  p41->add_option("--S", c.S, "Time indices excluded (with --omega builds S^c x Omega)");
  p41->add_option("--omega", c.omega, "Frequency indices (with --S)");
  p41->add_option("--window", c.window, "random | delta | flat");
  trials_option(p41, c);
  solver_options(p41, c);
  common_options(p41, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  for (auto* sub : app.get_subcommands()) {
    c.subcommand = sub->get_name();
    if (c.subcommand == "bt" && sub->count("--mode") == 0) c.mode = "greedy";
  }
  return annihilator::run(c);
}
