#ifndef ANNIHILATOR_GROUP_HPP
#define ANNIHILATOR_GROUP_HPP

#include <cmath>
#include <compare>
#include <initializer_list>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "annihilator/common.hpp"

namespace annihilator {

namespace detail {
struct TimeTag {};
struct FrequencyTag {};
}  // namespace detail

/// Coordinate tuple of a group (or dual group) element. Time and frequency
/// elements share a representation but not a type.
template <class Tag>
struct Element {
  std::vector<std::int64_t> coords;

  Element() = default;
  explicit Element(std::vector<std::int64_t> c) : coords(std::move(c)) {}
  Element(std::initializer_list<std::int64_t> c) : coords(c) {}

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

using GroupElement = Element<detail::TimeTag>;
using DualElement = Element<detail::FrequencyTag>;

/// The standard coordinate isomorphism between G and its dual.
inline DualElement as_dual(const GroupElement& x) { return DualElement(x.coords); }
inline GroupElement as_element(const DualElement& xi) { return GroupElement(xi.coords); }

/// A finite abelian group Z_{d_1} x ... x Z_{d_k}. Elements are flattened
/// row-major, first factor slowest.
class GroupSpec {
 public:
  GroupSpec() : GroupSpec(std::vector<std::int64_t>{1}) {}

  explicit GroupSpec(std::vector<std::int64_t> orders) : orders_(std::move(orders)) {
    if (orders_.empty()) throw DomainError("GroupSpec: at least one cyclic factor required");
    cardinality_ = 1;
    for (auto d : orders_) {
      if (d < 1) throw DomainError("GroupSpec: factor orders must be >= 1");
      cardinality_ *= static_cast<std::size_t>(d);
    }
    strides_.assign(orders_.size(), 1);
    for (std::size_t j = orders_.size() - 1; j > 0; --j) {
      strides_[j - 1] = strides_[j] * static_cast<std::size_t>(orders_[j]);
    }
  }

  GroupSpec(std::initializer_list<std::int64_t> orders)
      : GroupSpec(std::vector<std::int64_t>(orders)) {}

  /// Parses "4" or "2x3x5".
  static GroupSpec parse(std::string_view text) {
    std::vector<std::int64_t> orders;
    std::size_t pos = 0;
    if (text.empty()) throw ParseError("empty group spec");
    while (pos <= text.size()) {
      const auto next = text.find('x', pos);
      const auto token = text.substr(pos, next == std::string_view::npos ? text.npos : next - pos);
      if (token.empty()) throw ParseError("malformed group spec '" + std::string(text) + "'");
      std::int64_t value = 0;
      for (char c : token) {
        if (c < '0' || c > '9') {
          throw ParseError("malformed group spec '" + std::string(text) + "'");
        }
        value = value * 10 + (c - '0');
        if (value > (1LL << 31)) throw ParseError("group factor too large");
      }
      if (value < 1) throw ParseError("group factor orders must be >= 1");
      orders.push_back(value);
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return GroupSpec(std::move(orders));
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t j = 0; j < orders_.size(); ++j) {
      if (j) s += 'x';
      s += std::to_string(orders_[j]);
    }
    return s;
  }

  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  std::size_t factors() const noexcept { return orders_.size(); }
  std::size_t cardinality() const noexcept { return cardinality_; }
  std::size_t size() const noexcept { return cardinality_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(cardinality_); }
  std::size_t stride(std::size_t factor) const noexcept { return strides_[factor]; }

  template <class Tag>
  std::size_t index_of(const Element<Tag>& e) const {
    check(e);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < orders_.size(); ++j) {
      idx += static_cast<std::size_t>(reduce(e.coords[j], j)) * strides_[j];
    }
    return idx;
  }

  template <class Tag = detail::TimeTag>
  Element<Tag> element_at(std::size_t index) const {
    if (index >= cardinality_) throw DimensionError("element index out of range");
    Element<Tag> e;
    e.coords.resize(orders_.size());
    for (std::size_t j = 0; j < orders_.size(); ++j) {
      e.coords[j] = static_cast<std::int64_t>((index / strides_[j]) % static_cast<std::size_t>(orders_[j]));
    }
    return e;
  }

  DualElement dual_at(std::size_t index) const { return element_at<detail::FrequencyTag>(index); }

  template <class Tag>
  Element<Tag> normalize(const Element<Tag>& e) const {
    check(e);
    Element<Tag> r = e;
    for (std::size_t j = 0; j < orders_.size(); ++j) r.coords[j] = reduce(r.coords[j], j);
    return r;
  }

  template <class Tag>
  Element<Tag> add(const Element<Tag>& a, const Element<Tag>& b) const {
    check(a);
    check(b);
    Element<Tag> r;
    r.coords.resize(orders_.size());
    for (std::size_t j = 0; j < orders_.size(); ++j) r.coords[j] = reduce(a.coords[j] + b.coords[j], j);
    return r;
  }

  template <class Tag>
  Element<Tag> negate(const Element<Tag>& a) const {
    check(a);
    Element<Tag> r;
    r.coords.resize(orders_.size());
    for (std::size_t j = 0; j < orders_.size(); ++j) r.coords[j] = reduce(-a.coords[j], j);
    return r;
  }

  template <class Tag>
  Element<Tag> subtract(const Element<Tag>& a, const Element<Tag>& b) const {
    return add(a, negate(b));
  }

  /// Flat-index arithmetic used by the hot loops: index of a + b, a - b, -a.
  std::size_t add_index(std::size_t a, std::size_t b) const {
    std::size_t r = 0;
    for (std::size_t j = 0; j < orders_.size(); ++j) {
      const auto d = static_cast<std::size_t>(orders_[j]);
      const std::size_t ca = (a / strides_[j]) % d;
      const std::size_t cb = (b / strides_[j]) % d;
      r += ((ca + cb) % d) * strides_[j];
    }
    return r;
  }

  std::size_t negate_index(std::size_t a) const {
    std::size_t r = 0;
    for (std::size_t j = 0; j < orders_.size(); ++j) {
      const auto d = static_cast<std::size_t>(orders_[j]);
      const std::size_t ca = (a / strides_[j]) % d;
      r += ((d - ca) % d) * strides_[j];
    }
    return r;
  }

  std::size_t subtract_index(std::size_t a, std::size_t b) const { return add_index(a, negate_index(b)); }

  /// Numerator p of the pairing <xi, x> = exp(2 pi i p / |G|), for flat indices.
  std::size_t phase_index(std::size_t xi, std::size_t x) const {
    std::size_t p = 0;
    for (std::size_t j = 0; j < orders_.size(); ++j) {
      const auto d = static_cast<std::size_t>(orders_[j]);
      const std::size_t cx = (x / strides_[j]) % d;
      const std::size_t cxi = (xi / strides_[j]) % d;
      p += ((cx * cxi) % d) * (cardinality_ / d);
    }
    return p % cardinality_;
  }

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) { return a.orders_ == b.orders_; }

 private:
  template <class Tag>
  void check(const Element<Tag>& e) const {
    if (e.coords.size() != orders_.size()) {
      throw DimensionError("element has " + std::to_string(e.coords.size()) +
                           " coordinates, group has " + std::to_string(orders_.size()) +
                           " factors");
    }
  }

  std::int64_t reduce(std::int64_t v, std::size_t j) const {
    const auto d = orders_[j];
    const auto r = v % d;
    return r < 0 ? r + d : r;
  }

  std::vector<std::int64_t> orders_;
  std::vector<std::size_t> strides_;
  std::size_t cardinality_ = 1;
};

/// The |G|-th roots of unity, exp(2 pi i k / |G|). All character values are
/// read from this table so equal phases give bit-identical values.
class RootTable {
 public:
  explicit RootTable(std::size_t n) : roots_(n) {
    for (std::size_t k = 0; k < n; ++k) {
      const double t = two_pi * static_cast<double>(k) / static_cast<double>(n);
      roots_[k] = {std::cos(t), std::sin(t)};
    }
  }
  const cplx& operator[](std::size_t k) const { return roots_[k]; }

 private:
  std::vector<cplx> roots_;
};

/// <xi, x> = exp(2 pi i sum_j xi_j x_j / d_j).
inline cplx character(const GroupSpec& spec, const DualElement& xi, const GroupElement& x) {
  const std::size_t p = spec.phase_index(spec.index_of(xi), spec.index_of(x));
  const double t = two_pi * static_cast<double>(p) / static_cast<double>(spec.cardinality());
  return {std::cos(t), std::sin(t)};
}

namespace detail {

inline void check_signal(const GroupSpec& spec, const Signal& f, const char* what) {
  require_same_size(static_cast<std::size_t>(f.size()), spec.cardinality(), what);
}

/// out(k) = scale * sum_x f(x) * root[sign * phase(k, x)].
inline Signal character_sum(const GroupSpec& spec, const Signal& f, bool conjugate) {
  const std::size_t n = spec.cardinality();
  const RootTable roots(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Signal out(spec.dim());
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t p = spec.phase_index(k, x);
      if (conjugate && p != 0) p = n - p;
      acc += f(static_cast<Eigen::Index>(x)) * roots[p];
    }
    out(static_cast<Eigen::Index>(k)) = acc * scale;
  }
  return out;
}

/// In-place unitary 1-D transforms along every factor axis.
inline Signal factorized_sum(const GroupSpec& spec, const Signal& f, bool conjugate) {
  Signal cur = f;
  Signal next(spec.dim());
  const std::size_t n = spec.cardinality();
  for (std::size_t j = 0; j < spec.factors(); ++j) {
    const auto d = static_cast<std::size_t>(spec.orders()[j]);
    if (d == 1) continue;
    const std::size_t stride = spec.stride(j);
    const RootTable roots(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t base = 0; base < n; ++base) {
      if ((base / stride) % d != 0) continue;
      for (std::size_t k = 0; k < d; ++k) {
        cplx acc{0.0, 0.0};
        for (std::size_t x = 0; x < d; ++x) {
          std::size_t p = (k * x) % d;
          if (conjugate && p != 0) p = d - p;
          acc += cur(static_cast<Eigen::Index>(base + x * stride)) * roots[p];
        }
        next(static_cast<Eigen::Index>(base + k * stride)) = acc * scale;
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace detail

/// Which evaluation route a transform takes. Both agree to rounding.
enum class TransformPath { direct, factorized };

/// hat f(xi) = |G|^{-1/2} sum_x f(x) conj(<xi, x>).
inline Signal dft(const GroupSpec& spec, const Signal& f, TransformPath path = TransformPath::direct) {
  detail::check_signal(spec, f, "dft");
  return path == TransformPath::direct ? detail::character_sum(spec, f, true)
                                       : detail::factorized_sum(spec, f, true);
}

/// f(x) = |G|^{-1/2} sum_xi hat f(xi) <xi, x>.
inline Signal idft(const GroupSpec& spec, const Signal& fhat, TransformPath path = TransformPath::direct) {
  detail::check_signal(spec, fhat, "idft");
  return path == TransformPath::direct ? detail::character_sum(spec, fhat, false)
                                       : detail::factorized_sum(spec, fhat, false);
}

/// Complex array on G x hat G, x-major, xi-minor.
struct TFArray {
  GroupSpec spec;
  CVector values;

  TFArray() = default;
  explicit TFArray(GroupSpec s)
      : spec(std::move(s)), values(CVector::Zero(static_cast<Eigen::Index>(spec.cardinality() * spec.cardinality()))) {}
  TFArray(GroupSpec s, CVector v) : spec(std::move(s)), values(std::move(v)) {
    require_same_size(static_cast<std::size_t>(values.size()), spec.cardinality() * spec.cardinality(),
                      "TFArray");
  }

  std::size_t side() const noexcept { return spec.cardinality(); }
  cplx& operator()(std::size_t outer, std::size_t inner) {
    return values(static_cast<Eigen::Index>(outer * side() + inner));
  }
  const cplx& operator()(std::size_t outer, std::size_t inner) const {
    return values(static_cast<Eigen::Index>(outer * side() + inner));
  }
  double norm() const { return values.norm(); }
};

/// Fourier transform on G x hat G, evaluated as
///   out(eta, u) = |G|^{-1} sum_{x, xi} F(x, xi) conj(<eta, x>) conj(<xi, u>),
/// stored eta-major, u-minor. This is the indexing under which the
/// symmetry identity for products of short-time transforms holds.
inline TFArray dft_product(const TFArray& F, TransformPath path = TransformPath::factorized) {
  const GroupSpec& spec = F.spec;
  const std::size_t n = spec.cardinality();
  require_same_size(static_cast<std::size_t>(F.values.size()), n * n, "dft_product");
  // Transform each x-row along xi (giving u), then each u-column along x (giving eta).
  TFArray stage(spec);
  for (std::size_t x = 0; x < n; ++x) {
    Signal row(spec.dim());
    for (std::size_t xi = 0; xi < n; ++xi) row(static_cast<Eigen::Index>(xi)) = F(x, xi);
    const Signal t = dft(spec, row, path);
    for (std::size_t u = 0; u < n; ++u) stage(x, u) = t(static_cast<Eigen::Index>(u));
  }
  TFArray out(spec);
  for (std::size_t u = 0; u < n; ++u) {
    Signal col(spec.dim());
    for (std::size_t x = 0; x < n; ++x) col(static_cast<Eigen::Index>(x)) = stage(x, u);
    const Signal t = dft(spec, col, path);
    for (std::size_t eta = 0; eta < n; ++eta) out(eta, u) = t(static_cast<Eigen::Index>(eta));
  }
  return out;
}

}  // namespace annihilator

#endif  // ANNIHILATOR_GROUP_HPP
