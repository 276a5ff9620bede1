#include <gtest/gtest.h>

#include "annihilator/annihilation.hpp"
#include "annihilator/stft.hpp"
#include "oracles.hpp"

using namespace annihilator;

namespace {

oracle::Orders orders_of(const GroupSpec& s) {
  oracle::Orders o;
  for (auto d : s.orders()) o.push_back(static_cast<int>(d));
  return o;
}

Signal gauss(const GroupSpec& s, std::uint64_t seed, std::uint64_t trial = 0) {
  Rng rng(seed, trial, Purpose::vector);
  return rng.complex_gaussian(s.dim());
}

Signal delta0(Eigen::Index n) {
  Signal f = Signal::Zero(n);
  f(0) = 1.0;
  return f;
}

const std::vector<std::string> kSuiteGroups = {"2", "3", "4", "5", "6", "7", "8", "2x2", "2x3", "2x4", "3x3"};

}  // namespace

TEST(Shifts, Examples) {
  const GroupSpec g({5});
  EXPECT_EQ(translate(g, delta0(5), GroupElement{3}), Signal(Signal::Unit(5, 3)));
  const Signal f = gauss(g, 1);
  EXPECT_EQ(modulate(g, f, DualElement{0}), f);
  EXPECT_LT((tf_shift(g, f, {GroupElement{0}, DualElement{0}}) - f).norm(), 1e-15);

  const GroupSpec z2({2});
  const Signal p = tf_shift(z2, delta0(2), {GroupElement{1}, DualElement{1}});
  EXPECT_NEAR(std::abs(p(0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p(1) + 1.0), 0.0, 1e-15);
}

TEST(Shifts, FourierOfTranslateIsModulation) {
  const GroupSpec g({6});
  const auto o = orders_of(g);
  const Signal f = gauss(g, 2);
  for (int x = 0; x < 6; ++x) {
    const Signal lhs = dft(g, translate(g, f, g.element_at(static_cast<std::size_t>(x))));
    const Signal rhs = oracle::modulate(o, oracle::dft(o, f), oracle::neg(o, x));
    EXPECT_LT((lhs - rhs).norm(), 1e-12);
  }
}

TEST(Shifts, MatchOracleAndAreUnitary) {
  for (const char* s : {"6", "2x3", "2x2x2"}) {
    const GroupSpec g = GroupSpec::parse(s);
    const auto o = orders_of(g);
    const Signal f = gauss(g, 3);
    for (std::size_t i = 0; i < g.cardinality(); ++i) {
      const int ii = static_cast<int>(i);
      EXPECT_LT((translate(g, f, g.element_at(i)) - oracle::translate(o, f, ii)).norm(), 1e-14);
      EXPECT_LT((modulate(g, f, g.dual_at(i)) - oracle::modulate(o, f, ii)).norm(), 1e-13);
      EXPECT_NEAR(tf_shift(g, f, {g.element_at(i), g.dual_at(i)}).norm(), f.norm(), 1e-12);
    }
  }
}

TEST(Stft, Z2DeltaExample) {
  const GroupSpec g({2});
  const TFArray v = stft(g, delta0(2), delta0(2));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(v(0, 0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v(0, 1) - r), 0.0, 1e-15);
  EXPECT_EQ(std::abs(v(1, 0)), 0.0);
  EXPECT_EQ(std::abs(v(1, 1)), 0.0);
  EXPECT_LT((stft_inverse(v, delta0(2)) - delta0(2)).norm(), 1e-15);
}

TEST(Stft, ZeroSignal) {
  const GroupSpec g({4});
  EXPECT_EQ(stft(g, Signal::Zero(4), gauss(g, 1)).norm(), 0.0);
  EXPECT_EQ(stft_inverse(TFArray(g), gauss(g, 1)).norm(), 0.0);
  EXPECT_THROW(stft_inverse(TFArray(g), Signal::Zero(4)), DomainError);
  EXPECT_THROW(stft(g, Signal::Zero(3), gauss(g, 1)), DimensionError);
}

TEST(Stft, MatchesOracleEnergyAndInversion) {
  std::uint64_t seed = 10;
  for (const auto& s : kSuiteGroups) {
    const GroupSpec g = GroupSpec::parse(s);
    const Signal f = gauss(g, ++seed), w = gauss(g, ++seed);
    const TFArray v = stft(g, f, w);
    EXPECT_LT((v.values - oracle::stft(orders_of(g), f, w)).norm(), 1e-12) << s;
    EXPECT_NEAR(v.norm(), f.norm() * w.norm(), 1e-10) << s;
    EXPECT_LT((stft_inverse(v, w) - f).norm(), 1e-10) << s;
  }
}

TEST(Stft, DefinitionAsInnerProduct) {
  const GroupSpec g = GroupSpec::parse("2x3");
  const Signal f = gauss(g, 4), w = gauss(g, 5);
  const TFArray v = stft(g, f, w);
  for (std::size_t x = 0; x < 6; ++x) {
    for (std::size_t xi = 0; xi < 6; ++xi) {
      const Signal p = tf_shift(g, w, {g.element_at(x), g.dual_at(xi)});
      EXPECT_NEAR(std::abs(v(x, xi) - p.dot(f) / std::sqrt(6.0)), 0.0, 1e-12);
    }
  }
}

TEST(Identities, CovarianceExamples) {
  const GroupSpec g({4});
  const Signal f = gauss(g, 1), w = gauss(g, 2);
  EXPECT_LT(covariance_check(g, f, w, GroupElement{0}, DualElement{0}, GroupElement{0}, DualElement{0}), 1e-15);
  for (std::size_t t = 0; t < 10; ++t) {
    Rng rng(3, t, Purpose::vector);
    for (const char* s : {"4", "2x2"}) {
      const GroupSpec h = GroupSpec::parse(s);
      const auto pick = [&] { return rng.below(h.cardinality()); };
      EXPECT_LT(covariance_check(h, gauss(h, 4, t), gauss(h, 5, t), h.element_at(pick()), h.dual_at(pick()),
                                 h.element_at(pick()), h.dual_at(pick())),
                1e-10);
    }
  }
}

TEST(Identities, CovarianceAgainstOracle) {
  // Both sides rebuilt from the naive transforms.
  const GroupSpec g = GroupSpec::parse("2x3");
  const auto o = orders_of(g);
  const int n = 6;
  const Signal f = gauss(g, 7), w = gauss(g, 8);
  const int a = 4, u = 5, b = 1, v = 2;
  const oracle::Vec lhs = oracle::stft(o, oracle::modulate(o, oracle::translate(o, f, a), u),
                                       oracle::modulate(o, oracle::translate(o, w, b), v));
  const oracle::Vec base = oracle::stft(o, f, w);
  double dev = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int xi = 0; xi < n; ++xi) {
      const cplx ph = oracle::chi(o, oracle::sub(o, oracle::sub(o, u, v), xi), a) * oracle::chi(o, v, x);
      const cplx rhs = ph * base(oracle::add(o, oracle::sub(o, x, a), b) * n + oracle::add(o, oracle::sub(o, xi, u), v));
      dev = std::max(dev, std::abs(lhs(x * n + xi) - rhs));
    }
  }
  EXPECT_LT(dev, 1e-12);
  EXPECT_LT(covariance_check(g, f, w, g.element_at(a), g.dual_at(u), g.element_at(b), g.dual_at(v)), 1e-12);
}

TEST(Identities, Fundstft) {
  EXPECT_LT(fundstft_check(GroupSpec({2}), delta0(2), delta0(2)), 1e-12);
  const GroupSpec z5({5});
  EXPECT_LT(fundstft_check(z5, gauss(z5, 1), gauss(z5, 2)), 1e-10);
  EXPECT_EQ(fundstft_check(z5, Signal::Zero(5), gauss(z5, 2)), 0.0);
  // Oracle form on Z_5.
  const auto o = orders_of(z5);
  const Signal f = gauss(z5, 1), w = gauss(z5, 2);
  const oracle::Vec l = oracle::stft(o, f, w), r = oracle::stft(o, oracle::dft(o, f), oracle::dft(o, w));
  for (int x = 0; x < 5; ++x) {
    for (int xi = 0; xi < 5; ++xi) {
      EXPECT_NEAR(std::abs(l(x * 5 + xi) - std::conj(oracle::chi(o, xi, x)) * r(xi * 5 + oracle::neg(o, x))), 0.0, 1e-12);
    }
  }
}

TEST(Identities, SymmetryLemma) {
  const Signal d = delta0(2);
  EXPECT_LT(symmetry_lemma_check(GroupSpec({2}), d, d, d, d), 1e-12);
  const GroupSpec g = GroupSpec::parse("2x3");
  EXPECT_EQ(symmetry_lemma_check(g, gauss(g, 1), gauss(g, 2), gauss(g, 3), Signal::Zero(6)), 0.0);
  EXPECT_LT(symmetry_lemma_check(g, gauss(g, 1), gauss(g, 2), gauss(g, 3), gauss(g, 4)), 1e-10);

  // Oracle: left side through the naive product transform.
  const auto o = orders_of(g);
  const Signal f = gauss(g, 1), w = gauss(g, 2), h = gauss(g, 3), k = gauss(g, 4);
  const oracle::Vec prod = oracle::stft(o, f, w).cwiseProduct(oracle::stft(o, k, h).conjugate());
  const oracle::Vec lhs = oracle::dft_product(o, prod);
  const oracle::Vec vkf = oracle::stft(o, f, k), vhg = oracle::stft(o, w, h);
  for (int eta = 0; eta < 6; ++eta) {
    for (int u = 0; u < 6; ++u) {
      const int mu = oracle::neg(o, u);
      EXPECT_NEAR(std::abs(lhs(eta * 6 + u) - vkf(mu * 6 + eta) * std::conj(vhg(mu * 6 + eta))), 0.0, 1e-12);
    }
  }
}

TEST(Identities, RandomizedSuiteOverAllGroups) {
  for (const auto& s : kSuiteGroups) {
    const GroupSpec g = GroupSpec::parse(s);
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      Rng rng(31, t, Purpose::vector);
      const Signal f = rng.complex_gaussian(g.dim()), w = rng.complex_gaussian(g.dim());
      const Signal h = rng.complex_gaussian(g.dim()), k = rng.complex_gaussian(g.dim());
      const auto pick = [&] { return rng.below(g.cardinality()); };
      worst = std::max(worst, symmetry_lemma_check(g, f, w, h, k));
      worst = std::max(worst, fundstft_check(g, f, w));
      worst = std::max(worst, covariance_check(g, f, w, g.element_at(pick()), g.dual_at(pick()), g.element_at(pick()),
                                               g.dual_at(pick())));
    }
    EXPECT_LT(worst, 1e-10) << s;
  }
}

TEST(Stft, Nonvanishing) {
  for (const auto& s : kSuiteGroups) {
    const GroupSpec g = GroupSpec::parse(s);
    for (std::uint64_t t = 0; t < 10; ++t) {
      const Signal f = gauss(g, 41, t), w = gauss(g, 42, t);
      EXPECT_GT(stft(g, f, w).norm(), 0.0);
    }
  }
}

TEST(TildeSupport, Examples) {
  const GroupSpec g({4});
  const TFSupport one = TFSupport::from_points(g, {{GroupElement{1}, DualElement{2}}});
  EXPECT_EQ(tilde_support(one).flat(), (std::vector<std::size_t>{2 * 4 + 3}));
  EXPECT_EQ(tilde_support(one).axes(), TFAxes::frequency_time);
  EXPECT_EQ(tilde_support(TFSupport(g, {})).size(), 0u);
  std::vector<std::size_t> all(16);
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_EQ(tilde_support(TFSupport(g, all)).flat(), all);
  EXPECT_THROW(TFSupport(g, {3, 3}), DomainError);
  EXPECT_THROW(TFSupport(g, {16}), DomainError);
}

TEST(TildeSupport, InvolutionOnRandomSets) {
  const GroupSpec g = GroupSpec::parse("2x3");
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng(6, t, Purpose::subset);
    std::vector<std::size_t> flat;
    for (std::size_t i = 0; i < 36; ++i) {
      if (rng.uniform() < 0.3) flat.push_back(i);
    }
    const TFSupport s(g, flat);
    const TFSupport ts = tilde_support(s);
    EXPECT_EQ(ts.size(), s.size());
    EXPECT_EQ(untilde_support(ts), s);
  }
}

TEST(StftUpConstant, Examples) {
  EXPECT_DOUBLE_EQ(*stft_up_constant(4, 8, StftForm::squared), 32.0);
  EXPECT_DOUBLE_EQ(*stft_up_constant(0, 8, StftForm::norm), 2.0 * std::sqrt(2.0));
  EXPECT_FALSE(stft_up_constant(8, 8, StftForm::squared).has_value());
  EXPECT_FALSE(stft_up_constant(9, 8, StftForm::norm).has_value());
}

TEST(TransferConstant, ExamplesAndPipeline) {
  EXPECT_DOUBLE_EQ(transfer_constant(4.0), 8.0);
  EXPECT_DOUBLE_EQ(transfer_constant(1.0), 2.0);
  EXPECT_THROW(transfer_constant(0.0), DomainError);
  // Group constant on G x hat G with |Sigma| = |tilde Sigma|, squared, then transferred.
  for (std::size_t n : {8u, 12u, 16u}) {
    for (std::size_t sigma = 0; sigma < n; ++sigma) {
      const auto sq = group_sup_squared_constant(n * n, sigma, sigma);
      ASSERT_TRUE(sq.has_value());
      EXPECT_NEAR(transfer_constant(*sq), *stft_up_constant(sigma, n, StftForm::squared), 1e-9);
    }
  }
}

TEST(Corollary33, RandomDrawsSatisfyBothForms) {
  for (std::int64_t n : {8, 12, 16}) {
    const GroupSpec g({n});
    for (double frac : {0.25, 0.5, 0.75}) {
      const auto k = static_cast<std::size_t>(frac * static_cast<double>(n));
      for (std::uint64_t t = 0; t < 20; ++t) {
        Rng rng(static_cast<std::uint64_t>(n) * 10 + static_cast<std::uint64_t>(frac * 4), t, Purpose::window);
        const Signal f = rng.complex_gaussian(g.dim());
        const Signal w = rng.unit_vector(g.dim());
        std::vector<std::size_t> all(static_cast<std::size_t>(n * n));
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
        all.resize(k);
        const TFSupport sigma(g, all);
        const double tail = tail_energy(stft(g, f, w), sigma);
        EXPECT_LE(f.squaredNorm(), *stft_up_constant(k, static_cast<std::size_t>(n), StftForm::squared) * tail + 1e-9);
        EXPECT_LE(f.norm(), *stft_up_constant(k, static_cast<std::size_t>(n), StftForm::norm) * std::sqrt(tail) + 1e-9);
      }
    }
  }
}

TEST(GaborFrame, Examples) {
  const GroupSpec g({2});
  const CMatrix fr = gabor_frame(g, delta0(2));
  CMatrix expect(2, 4);
  expect << 1, 1, 0, 0, 0, 0, 1, -1;
  EXPECT_LT((fr - expect).norm(), 1e-15);
  EXPECT_NEAR(frame_energy(fr, delta0(2)), 2.0, 1e-15);
  EXPECT_EQ(frame_energy(fr, Signal::Zero(2)), 0.0);
  EXPECT_THROW(gabor_frame(g, 2.0 * delta0(2)), DomainError);
}

TEST(GaborFrame, TightFrameOnRandomSignals) {
  for (const char* s : {"5", "2x3", "8"}) {
    const GroupSpec g = GroupSpec::parse(s);
    Rng rng(12, 0, Purpose::window);
    const CMatrix fr = gabor_frame(g, rng.unit_vector(g.dim()));
    const double d = static_cast<double>(g.cardinality());
    for (std::uint64_t t = 0; t < 100; ++t) {
      const Signal f = gauss(g, 13, t);
      EXPECT_NEAR(frame_energy(fr, f), d * f.squaredNorm(), 1e-10 * d * f.squaredNorm());
    }
  }
}
