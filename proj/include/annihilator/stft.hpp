#ifndef ANNIHILATOR_STFT_HPP
#define ANNIHILATOR_STFT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "annihilator/common.hpp"
#include "annihilator/group.hpp"

namespace annihilator {

/// lambda = (x, xi) in G x hat G.
struct TFPoint {
  GroupElement x;
  DualElement xi;
};

/// Which product the flat index of a TFSupport lives on.
enum class TFAxes { time_frequency, frequency_time };

/// Set of points in G x hat G (or hat G x G), kept as sorted flat indices
/// outer * |G| + inner.
class TFSupport {
 public:
  TFSupport() = default;
  TFSupport(GroupSpec spec, std::vector<std::size_t> flat, TFAxes axes = TFAxes::time_frequency)
      : spec_(std::move(spec)), flat_(std::move(flat)), axes_(axes) {
    const std::size_t n2 = spec_.cardinality() * spec_.cardinality();
    std::sort(flat_.begin(), flat_.end());
    for (std::size_t i = 0; i < flat_.size(); ++i) {
      if (flat_[i] >= n2) throw DomainError("TFSupport: point out of range");
      if (i > 0 && flat_[i] == flat_[i - 1]) throw DomainError("TFSupport: duplicate point");
    }
  }

  static TFSupport from_points(const GroupSpec& spec, const std::vector<TFPoint>& points) {
    std::vector<std::size_t> flat;
    flat.reserve(points.size());
    for (const auto& p : points) flat.push_back(spec.index_of(p.x) * spec.cardinality() + spec.index_of(p.xi));
    return TFSupport(spec, std::move(flat));
  }

  const GroupSpec& spec() const noexcept { return spec_; }
  const std::vector<std::size_t>& flat() const noexcept { return flat_; }
  TFAxes axes() const noexcept { return axes_; }
  std::size_t size() const noexcept { return flat_.size(); }
  bool contains(std::size_t flat_index) const { return std::binary_search(flat_.begin(), flat_.end(), flat_index); }

  std::vector<bool> mask() const {
    std::vector<bool> m(spec_.cardinality() * spec_.cardinality(), false);
    for (auto f : flat_) m[f] = true;
    return m;
  }

  friend bool operator==(const TFSupport& a, const TFSupport& b) {
    return a.spec_ == b.spec_ && a.flat_ == b.flat_ && a.axes_ == b.axes_;
  }

 private:
  GroupSpec spec_;
  std::vector<std::size_t> flat_;
  TFAxes axes_ = TFAxes::time_frequency;
};

/// T_x f(y) = f(y - x).
inline Signal translate(const GroupSpec& spec, const Signal& f, const GroupElement& x) {
  detail::check_signal(spec, f, "translate");
  const std::size_t xs = spec.index_of(x);
  Signal out(spec.dim());
  for (std::size_t y = 0; y < spec.cardinality(); ++y) {
    out(static_cast<Eigen::Index>(y)) = f(static_cast<Eigen::Index>(spec.subtract_index(y, xs)));
  }
  return out;
}

/// M_xi f(y) = f(y) <xi, y>.
inline Signal modulate(const GroupSpec& spec, const Signal& f, const DualElement& xi) {
  detail::check_signal(spec, f, "modulate");
  const std::size_t k = spec.index_of(xi);
  const RootTable roots(spec.cardinality());
  Signal out(spec.dim());
  for (std::size_t y = 0; y < spec.cardinality(); ++y) {
    out(static_cast<Eigen::Index>(y)) = f(static_cast<Eigen::Index>(y)) * roots[spec.phase_index(k, y)];
  }
  return out;
}

/// pi(x, xi) f = M_xi T_x f.
inline Signal tf_shift(const GroupSpec& spec, const Signal& f, const TFPoint& lambda) {
  return modulate(spec, translate(spec, f, lambda.x), lambda.xi);
}

/// V_g f(x, xi) = |G|^{-1/2} <f, pi(x, xi) g> = F_G[f . conj(T_x g)](xi).
inline TFArray stft(const GroupSpec& spec, const Signal& f, const Signal& g) {
  detail::check_signal(spec, f, "stft signal");
  detail::check_signal(spec, g, "stft window");
  const std::size_t n = spec.cardinality();
  TFArray out(spec);
  Signal windowed(spec.dim());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      windowed(static_cast<Eigen::Index>(y)) =
          f(static_cast<Eigen::Index>(y)) * std::conj(g(static_cast<Eigen::Index>(spec.subtract_index(y, x))));
    }
    const Signal row = dft(spec, windowed, TransformPath::factorized);
    for (std::size_t xi = 0; xi < n; ++xi) out(x, xi) = row(static_cast<Eigen::Index>(xi));
  }
  return out;
}

inline constexpr double kWindowFloor = 1e-12;

/// f(y) = (|G|^{1/2} ||g||^2)^{-1} sum_{x,xi} V(x, xi) g(y - x) <xi, y>.
inline Signal stft_inverse(const TFArray& v, const Signal& g) {
  const GroupSpec& spec = v.spec;
  detail::check_signal(spec, g, "stft_inverse window");
  const double g2 = g.squaredNorm();
  if (std::sqrt(g2) < kWindowFloor) throw DomainError("stft_inverse: window norm below 1e-12");
  const std::size_t n = spec.cardinality();
  Signal out = Signal::Zero(spec.dim());
  Signal row(spec.dim());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t xi = 0; xi < n; ++xi) row(static_cast<Eigen::Index>(xi)) = v(x, xi);
    // idft already carries the |G|^{-1/2} factor.
    const Signal back = idft(spec, row, TransformPath::factorized);
    for (std::size_t y = 0; y < n; ++y) {
      out(static_cast<Eigen::Index>(y)) +=
          back(static_cast<Eigen::Index>(y)) * g(static_cast<Eigen::Index>(spec.subtract_index(y, x)));
    }
  }
  return out / g2;
}

/// Max deviation between V_{pi(b,v)g} pi(a,u) f (x, xi) and
/// <u - v - xi, a> <v, x> V_g f(x - a + b, xi - u + v) over all (x, xi).
inline double covariance_check(const GroupSpec& spec, const Signal& f, const Signal& g, const GroupElement& a,
                               const DualElement& u, const GroupElement& b, const DualElement& v) {
  const TFArray lhs = stft(spec, tf_shift(spec, f, {a, u}), tf_shift(spec, g, {b, v}));
  const TFArray base = stft(spec, f, g);
  const std::size_t n = spec.cardinality();
  const RootTable roots(n);
  const std::size_t ai = spec.index_of(a), ui = spec.index_of(u), bi = spec.index_of(b), vi = spec.index_of(v);
  double dev = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t xi = 0; xi < n; ++xi) {
      const std::size_t freq = spec.subtract_index(spec.subtract_index(ui, vi), xi);  // u - v - xi
      const cplx phase = roots[spec.phase_index(freq, ai)] * roots[spec.phase_index(vi, x)];
      const std::size_t xs = spec.add_index(spec.subtract_index(x, ai), bi);
      const std::size_t fs = spec.add_index(spec.subtract_index(xi, ui), vi);
      dev = std::max(dev, std::abs(lhs(x, xi) - phase * base(xs, fs)));
    }
  }
  return dev;
}

/// Max deviation between V_g f(x, xi) and conj(<xi, x>) V_{hat g} hat f (xi, -x).
/// The transform on hat G uses the same coordinates, so it is `stft` again.
inline double fundstft_check(const GroupSpec& spec, const Signal& f, const Signal& g) {
  const TFArray lhs = stft(spec, f, g);
  const TFArray dual = stft(spec, dft(spec, f, TransformPath::factorized), dft(spec, g, TransformPath::factorized));
  const std::size_t n = spec.cardinality();
  const RootTable roots(n);
  double dev = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t xi = 0; xi < n; ++xi) {
      const cplx rhs = std::conj(roots[spec.phase_index(xi, x)]) * dual(xi, spec.negate_index(x));
      dev = std::max(dev, std::abs(lhs(x, xi) - rhs));
    }
  }
  return dev;
}

/// Max deviation between F_{G x hat G}[V_g f . conj(V_h k)](eta, u) and
/// V_k f(-u, eta) . conj(V_h g(-u, eta)).
inline double symmetry_lemma_check(const GroupSpec& spec, const Signal& f, const Signal& g, const Signal& h,
                                   const Signal& k) {
  const TFArray vgf = stft(spec, f, g);
  const TFArray vhk = stft(spec, k, h);
  TFArray prod(spec);
  prod.values = vgf.values.cwiseProduct(vhk.values.conjugate());
  const TFArray lhs = dft_product(prod);
  const TFArray vkf = stft(spec, f, k);
  const TFArray vhg = stft(spec, g, h);
  const std::size_t n = spec.cardinality();
  double dev = 0.0;
  for (std::size_t eta = 0; eta < n; ++eta) {
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t mu = spec.negate_index(u);
      dev = std::max(dev, std::abs(lhs(eta, u) - vkf(mu, eta) * std::conj(vhg(mu, eta))));
    }
  }
  return dev;
}

/// {(xi, -x) : (x, xi) in Sigma}, a subset of hat G x G.
inline TFSupport tilde_support(const TFSupport& sigma) {
  const GroupSpec& spec = sigma.spec();
  const std::size_t n = spec.cardinality();
  std::vector<std::size_t> flat;
  flat.reserve(sigma.size());
  for (auto p : sigma.flat()) {
    const std::size_t outer = p / n, inner = p % n;
    flat.push_back(inner * n + spec.negate_index(outer));
  }
  const TFAxes axes = sigma.axes() == TFAxes::time_frequency ? TFAxes::frequency_time : TFAxes::time_frequency;
  return TFSupport(spec, std::move(flat), axes);
}

/// Inverse of tilde_support: (p, q) -> (-q, p).
inline TFSupport untilde_support(const TFSupport& sigma) {
  const GroupSpec& spec = sigma.spec();
  const std::size_t n = spec.cardinality();
  std::vector<std::size_t> flat;
  flat.reserve(sigma.size());
  for (auto p : sigma.flat()) {
    const std::size_t outer = p / n, inner = p % n;
    flat.push_back(spec.negate_index(inner) * n + outer);
  }
  const TFAxes axes = sigma.axes() == TFAxes::time_frequency ? TFAxes::frequency_time : TFAxes::time_frequency;
  return TFSupport(spec, std::move(flat), axes);
}

enum class StftForm {
  squared,  ///< bounds ||f||^2 by the squared tail sum
  norm,     ///< bounds ||f|| by the tail l2 norm
};

/// 8/(1 - |Sigma|/|G|)^2 (squared) or 2 sqrt 2/(1 - |Sigma|/|G|) (norm), for |Sigma| < |G|.
inline std::optional<double> stft_up_constant(std::size_t card_sigma, std::size_t card_g, StftForm form) {
  if (card_g == 0) throw DomainError("stft_up_constant: empty group");
  if (card_sigma >= card_g) return std::nullopt;
  const double gap = 1.0 - static_cast<double>(card_sigma) / static_cast<double>(card_g);
  return form == StftForm::squared ? 8.0 / (gap * gap) : 2.0 * std::numbers::sqrt2 / gap;
}

/// Squared-form STFT constant for unit windows obtained from a squared-form
/// strong-annihilation constant of (Sigma, tilde Sigma) on G x hat G.
inline double transfer_constant(double c_sigma) {
  if (!(c_sigma > 0.0)) throw DomainError("transfer_constant: constant must be > 0");
  return 2.0 * c_sigma;
}

/// sum_{(x, xi) not in Sigma} |V(x, xi)|^2.
inline double tail_energy(const TFArray& v, const TFSupport& sigma) {
  require_same_size(static_cast<std::size_t>(v.values.size()), sigma.spec().cardinality() * sigma.spec().cardinality(),
                    "tail_energy");
  const auto m = sigma.mask();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.values.size(); ++i) {
    if (!m[static_cast<std::size_t>(i)]) acc += std::norm(v.values(i));
  }
  return acc;
}

inline constexpr double kUnitWindowTolerance = 1e-10;

inline void require_unit_window(const Signal& g, const char* what) {
  if (std::abs(g.norm() - 1.0) > kUnitWindowTolerance) {
    throw DomainError(std::string(what) + ": window must have unit l2 norm");
  }
}

/// The |G|^2 vectors pi(x, xi) g as columns, in canonical (x, xi) order.
inline CMatrix gabor_frame(const GroupSpec& spec, const Signal& g) {
  detail::check_signal(spec, g, "gabor_frame");
  require_unit_window(g, "gabor_frame");
  const std::size_t n = spec.cardinality();
  CMatrix frame(spec.dim(), static_cast<Eigen::Index>(n * n));
  const RootTable roots(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t xi = 0; xi < n; ++xi) {
      auto col = frame.col(static_cast<Eigen::Index>(x * n + xi));
      for (std::size_t y = 0; y < n; ++y) {
        col(static_cast<Eigen::Index>(y)) =
            g(static_cast<Eigen::Index>(spec.subtract_index(y, x))) * roots[spec.phase_index(xi, y)];
      }
    }
  }
  return frame;
}

/// sum_j |<f, e_j>|^2 over the columns of `frame`.
inline double frame_energy(const CMatrix& frame, const Signal& f) {
  require_same_size(static_cast<std::size_t>(f.size()), static_cast<std::size_t>(frame.rows()), "frame_energy");
  return (frame.adjoint() * f).squaredNorm();
}

}  // namespace annihilator

#endif  // ANNIHILATOR_STFT_HPP
