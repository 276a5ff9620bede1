#ifndef ANNIHILATOR_RNG_HPP
#define ANNIHILATOR_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

#include "annihilator/common.hpp"

namespace annihilator {

/// Purpose tags keep the streams for different random objects of one trial apart.
enum class Purpose : std::uint64_t {
  basis_phi = 1,
  basis_psi = 2,
  support = 3,
  vector = 4,
  subset = 5,
  window = 6,
  solver = 7,
  sparse_signal = 8,
  search = 9,
  probe = 10,
};

namespace detail {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: output n is a bijective mix of key + n * golden gamma.
/// Streams are keyed by (master seed, trial index, purpose) so trials can run in
/// any order, on any thread, and still draw the same numbers.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t trial, Purpose purpose) noexcept
      : key_(derive_key(seed, trial, static_cast<std::uint64_t>(purpose))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return detail::splitmix_finalize(key_ + counter_ * kGamma);
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  CVector complex_gaussian(Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
  }

  CVector unit_vector(Eigen::Index n) {
    CVector v = complex_gaussian(n);
    return v / v.norm();
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t trial,
                                            std::uint64_t purpose) noexcept {
    std::uint64_t k = detail::splitmix_finalize(seed + kGamma);
    k = detail::splitmix_finalize(k ^ (trial + 0x632be59bd9b4e019ULL));
    return detail::splitmix_finalize(k ^ (purpose * 0xd1b54a32d192ed03ULL));
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace annihilator

#endif  // ANNIHILATOR_RNG_HPP
