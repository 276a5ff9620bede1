// Annihilating-pair constants for the standard and Fourier bases of Z_16,
// then an STFT uncertainty check for a random window.
#include <iostream>

#include "annihilator/annihilator.hpp"

int main() {
  using namespace annihilator;
  const GroupSpec spec = GroupSpec::parse("16");
  const Basis e = standard_basis(spec.dim());
  const Basis f = fourier_basis(spec);
  const SupportSet S = SupportSet::parse("0,2", 16);
  const SupportSet Sigma = SupportSet::parse("1,5", 16);

  const AnnihilationReport r = annihilation_report(e, f, S, Sigma);
  std::cout << io::to_json(r).dump(2) << "\n";

  Rng rng(7, 0, Purpose::window);
  const Signal g = rng.unit_vector(spec.dim());
  const Signal x = Rng(7, 0, Purpose::vector).complex_gaussian(spec.dim());
  const TFSupport sigma(spec, {0, 17, 34, 51});
  const double tail = tail_energy(stft(spec, x, g), sigma);
  std::cout << "||f||^2 = " << x.squaredNorm() << ", bound * tail = "
            << *stft_up_constant(sigma.size(), 16, StftForm::squared) * tail << "\n";
}
