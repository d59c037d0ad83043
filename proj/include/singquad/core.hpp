#pragma once

/**
 * @file core.hpp
 * @brief Domain types shared by the quadrature modules.
 *
 * Integrands handled by this library have the form
 *
 *     f(x) = |x - x0|^gamma * l(|x - x0|, (x - x0)/|x - x0|) * v(x)
 *
 * with v smooth and compactly supported. The singular point is written as
 * x0 = h (m + alpha) with m an integer node and |alpha|_inf <= 1/2.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "singquad/errors.hpp"

namespace singquad {

inline constexpr int kMaxDimension = 3;

using Point = std::array<double, kMaxDimension>;
using IntPoint = std::array<long, kMaxDimension>;

/// Function on the unit sphere S^{n-1}; the argument has n components.
using AngularFn = std::function<double(std::span<const double>)>;
/// Function of (r, u) with u on the unit sphere.
using RadialAngularFn = std::function<double(double, std::span<const double>)>;
/// Function of a point in R^n.
using PointFn = std::function<double(std::span<const double>)>;

// ---------------------------------------------------------------------------
// Multi-indices
// ---------------------------------------------------------------------------

/// Exponent vector nu in N_0^n, used for monomials x^nu and derivatives.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
    for (int e : exponents_) require(e >= 0, ErrorKind::invalid_parameters, "multi-index entries must be >= 0");
  }
  MultiIndex(std::initializer_list<int> exponents) : MultiIndex(std::vector<int>(exponents)) {}

  int dimension() const noexcept { return static_cast<int>(exponents_.size()); }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const noexcept { return exponents_; }

  /// |nu|, the total degree.
  int order() const noexcept { return std::accumulate(exponents_.begin(), exponents_.end(), 0); }

  /// nu! = prod nu_i!, exact for |nu| <= 20.
  std::uint64_t factorial() const {
    require(order() <= 20, ErrorKind::invalid_parameters, "multi-index factorial overflows beyond |nu| = 20");
    std::uint64_t result = 1;
    for (int e : exponents_)
      for (int k = 2; k <= e; ++k) result *= static_cast<std::uint64_t>(k);
    return result;
  }

  /// x^nu for a point with dimension() components.
  template <class Real>
  Real monomial(std::span<const Real> x) const {
    Real result = 1;
    for (std::size_t i = 0; i < exponents_.size(); ++i)
      for (int k = 0; k < exponents_[i]; ++k) result *= x[i];
    return result;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exponents_;
};

inline std::uint64_t binomial(int top, int bottom) {
  if (bottom < 0 || bottom > top) return 0;
  bottom = std::min(bottom, top - bottom);
  std::uint64_t result = 1;
  for (int k = 1; k <= bottom; ++k) result = result * static_cast<std::uint64_t>(top - bottom + k) / static_cast<std::uint64_t>(k);
  return result;
}

/// Number of distinct partial derivatives of order at most p in n variables:
/// sum_{q=0}^{p} C(q + n - 1, n - 1).
inline std::size_t pi_count(int p, int n) {
  require(p >= 0 && n >= 1, ErrorKind::invalid_parameters, "pi_count needs p >= 0 and n >= 1");
  std::size_t total = 0;
  for (int q = 0; q <= p; ++q) total += binomial(q + n - 1, n - 1);
  return total;
}

/// All multi-indices with |nu| <= p, graded by total degree and
/// lexicographically ascending inside each degree.
inline std::vector<MultiIndex> enumerate_multi_indices(int p, int n) {
  require(p >= 0 && n >= 1, ErrorKind::invalid_parameters, "enumerate_multi_indices needs p >= 0 and n >= 1");
  std::vector<MultiIndex> out;
  out.reserve(pi_count(p, n));
  std::vector<int> current(static_cast<std::size_t>(n), 0);
  for (int degree = 0; degree <= p; ++degree) {
    // Lexicographic enumeration of compositions of `degree` into n parts.
    std::function<void(int, int)> fill = [&](int position, int remaining) {
      if (position == n - 1) {
        current[static_cast<std::size_t>(position)] = remaining;
        out.emplace_back(current);
        return;
      }
      for (int e = 0; e <= remaining; ++e) {
        current[static_cast<std::size_t>(position)] = e;
        fill(position + 1, remaining - e);
      }
    };
    fill(0, degree);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Singular point placement
// ---------------------------------------------------------------------------

struct SingularityPlacement {
  IntPoint m{};
  Point alpha{};
};

/// Splits x0 = h (m + alpha) with |alpha|_inf <= 1/2. An exact tie
/// |alpha_i| = 1/2 resolves to alpha_i = +1/2.
inline SingularityPlacement split_singularity(std::span<const double> x0, double h) {
  require(h > 0, ErrorKind::invalid_parameters, "split_singularity needs h > 0");
  require(x0.size() >= 1 && x0.size() <= kMaxDimension, ErrorKind::invalid_parameters, "x0 must have 1..3 components");
  SingularityPlacement out;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const double t = x0[i] / h;
    double node = std::ceil(t - 0.5);
    double alpha = t - node;
    // Roundoff can push a tie just below -1/2.
    const double slack = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (alpha < -0.5 + slack) {
      node -= 1;
      alpha += 1;
    }
    if (alpha > 0.5) alpha = 0.5;
    out.m[i] = static_cast<long>(node);
    out.alpha[i] = alpha;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid context
// ---------------------------------------------------------------------------

/// Uniform grid h Z^n together with the placement of the singular point and
/// the radii under which the convergence theory holds.
struct GridContext {
  int n = 1;
  double h = 0.1;
  Point alpha{};
  IntPoint m{};
  double h0 = 1.0;                                           ///< upper bound on h
  double L = 1.0;                                            ///< window radius
  double Lprime = std::numeric_limits<double>::infinity();  ///< kernel validity radius

  /// Builds and validates a grid context.
  static GridContext make(int n, double h, std::span<const double> alpha, std::span<const long> m, double h0, double L,
                          double Lprime = std::numeric_limits<double>::infinity()) {
    GridContext g;
    g.n = n;
    g.h = h;
    g.h0 = h0;
    g.L = L;
    g.Lprime = Lprime;
    require(n >= 1 && n <= kMaxDimension, ErrorKind::invalid_parameters, "dimension must be 1, 2 or 3");
    require(alpha.size() == static_cast<std::size_t>(n) && m.size() == static_cast<std::size_t>(n),
            ErrorKind::invalid_parameters, "alpha and m must have n components");
    std::copy(alpha.begin(), alpha.end(), g.alpha.begin());
    std::copy(m.begin(), m.end(), g.m.begin());
    g.validate();
    return g;
  }

  /// Grid with m = 0 (singular point at h alpha).
  static GridContext centered(int n, double h, std::span<const double> alpha, double h0, double L,
                              double Lprime = std::numeric_limits<double>::infinity()) {
    IntPoint zero{};
    return make(n, h, alpha, std::span<const long>(zero.data(), static_cast<std::size_t>(n)), h0, L, Lprime);
  }

  void validate() const {
    require(n >= 1 && n <= kMaxDimension, ErrorKind::invalid_parameters, "dimension must be 1, 2 or 3");
    require(h > 0 && h < h0 && h0 <= 1, ErrorKind::invalid_parameters, "need 0 < h < h0 <= 1");
    for (int i = 0; i < n; ++i)
      require(std::abs(alpha[static_cast<std::size_t>(i)]) <= 0.5, ErrorKind::invalid_parameters, "need |alpha|_inf <= 1/2");
    require(L > 0, ErrorKind::invalid_parameters, "window radius L must be positive");
    require(L + 1.5 * h0 * std::sqrt(static_cast<double>(n)) < Lprime, ErrorKind::invalid_parameters,
            "need L + (3/2) h0 sqrt(n) < L'");
  }

  /// Checks that every stencil node of the coarsest grid sits on the plateau
  /// of the window: L >= (4/3) h0 max_i |c_i|.
  void validate_stencil_radius(double max_stencil_norm) const {
    require(L >= (4.0 / 3.0) * h0 * max_stencil_norm * (1 - 1e-15), ErrorKind::invalid_parameters,
            "need L >= (4/3) h0 max |c_i|");
  }

  std::span<const double> alpha_span() const { return {alpha.data(), static_cast<std::size_t>(n)}; }
  std::span<const long> m_span() const { return {m.data(), static_cast<std::size_t>(n)}; }

  /// x0 = h (m + alpha).
  Point singular_point() const {
    Point x{};
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = h * (static_cast<double>(m[static_cast<std::size_t>(i)]) + alpha[static_cast<std::size_t>(i)]);
    return x;
  }
};

// ---------------------------------------------------------------------------
// Integrand factors
// ---------------------------------------------------------------------------

/// Singular factor s(x) = |x|^gamma l(|x|, x/|x|).
///
/// An r-independent kernel carries only `angular` (l0). A kernel that depends
/// on r also carries `full` (l) and the expansion terms phi_k of l in r at
/// r = 0, with `angular` equal to phi_0.
struct SingularKernel {
  int n = 1;
  double gamma = 0;
  AngularFn angular;
  std::vector<AngularFn> radial_expansion;
  RadialAngularFn full;
  std::string id = "custom";
  double validity_radius = std::numeric_limits<double>::infinity();

  bool r_independent() const noexcept { return !static_cast<bool>(full); }

  void validate() const {
    require(n >= 1 && n <= kMaxDimension, ErrorKind::invalid_parameters, "kernel dimension must be 1, 2 or 3");
    require(gamma > -n, ErrorKind::invalid_parameters, "kernel exponent must satisfy gamma > -n");
    require(static_cast<bool>(angular), ErrorKind::invalid_parameters, "kernel needs an angular profile");
  }

  /// l(r, u), falling back to l0(u) for r-independent kernels.
  double profile(double r, std::span<const double> u) const { return full ? full(r, u) : angular(u); }
};

inline SingularKernel make_kernel(int n, double gamma, AngularFn angular, std::string id = "custom") {
  SingularKernel k;
  k.n = n;
  k.gamma = gamma;
  k.angular = std::move(angular);
  k.id = std::move(id);
  k.validate();
  return k;
}

/// Kernel with r-dependent profile l and its expansion terms phi_0..phi_P.
inline SingularKernel make_expanded_kernel(int n, double gamma, RadialAngularFn full, std::vector<AngularFn> expansion,
                                           std::string id = "custom",
                                           double validity_radius = std::numeric_limits<double>::infinity()) {
  require(!expansion.empty(), ErrorKind::insufficient_expansion, "expanded kernel needs at least phi_0");
  SingularKernel k;
  k.n = n;
  k.gamma = gamma;
  k.angular = expansion.front();
  k.radial_expansion = std::move(expansion);
  k.full = std::move(full);
  k.id = std::move(id);
  k.validity_radius = validity_radius;
  k.validate();
  return k;
}

/// Smooth factor v, identically zero outside the ball of `support_radius`
/// centred at the origin.
struct SmoothFactor {
  PointFn value;
  double support_radius = 1;
  std::string id = "custom";

  double operator()(std::span<const double> x) const { return value(x); }
};

inline double norm(std::span<const double> x) {
  double s = 0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

}  // namespace singquad
