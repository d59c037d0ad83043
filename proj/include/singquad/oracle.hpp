#pragma once

/**
 * @file oracle.hpp
 * @brief Reference integrals and observed convergence orders.
 *
 * The reference integral works in polar coordinates about x0 and shares no
 * quadrature code with the lattice or moment modules: radial integrals use
 * adaptive Gauss-Kronrod on panels refined geometrically toward r = 0,
 * angular integrals use their own trapezoidal / Gauss-Legendre products with
 * nodes from Boost.Math.
 */

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "singquad/core.hpp"

namespace singquad {

struct OracleOptions {
  int radial_panels = 60;          ///< budget of geometric panels toward the singular point
  int initial_resolution = 32;     ///< first angular resolution (n = 2: nodes; n = 3: polar nodes)
  int max_resolution = 2048;
  double panel_tolerance = 1e-13;  ///< Gauss/Kronrod gap accepted per line, relative to its L1 norm
  unsigned max_depth = 12;         ///< bisection depth per panel
  double inner_radius = 1e-12;     ///< below this the integrand is replaced by its r -> 0 form
};

struct ReferenceValue {
  double value = 0;
  double achieved_tolerance = 0;  ///< gap between the last two angular refinements
  int angular_resolution = 0;
};

namespace detail {

/// int_0^inf r^{gamma+n-1} l(r, u) v(x0 + r u) dr along one direction.
inline double radial_line(const SingularKernel& kernel, const SmoothFactor& v, std::span<const double> x0,
                          std::span<const double> u, const OracleOptions& options) {
  const int n = kernel.n;
  const double e = kernel.gamma + n - 1;
  // The ray leaves the support ball |x| < R_v at r_exit.
  double b = 0, c = 0;
  for (int i = 0; i < n; ++i) {
    b += x0[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
    c += x0[static_cast<std::size_t>(i)] * x0[static_cast<std::size_t>(i)];
  }
  const double R = v.support_radius;
  const double disc = b * b - c + R * R;
  if (disc <= 0) return 0;
  const double r_enter = std::max(0.0, -b - std::sqrt(disc));
  const double r_exit = -b + std::sqrt(disc);
  if (r_exit <= 0) return 0;

  Point x{};
  auto g = [&](double r) {
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = x0[static_cast<std::size_t>(i)] + r * u[static_cast<std::size_t>(i)];
    const double vx = v(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
    if (vx == 0) return 0.0;
    return std::pow(r, e) * kernel.profile(r, u) * vx;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

  // Panels: geometric toward r = 0 when the ray starts at the singular point.
  std::vector<std::pair<double, double>> panels;
  double inner = 0;
  if (r_enter > 0) {
    panels.emplace_back(r_enter, r_exit);
  } else {
    double hi = r_exit;
    for (int k = 0; k < options.radial_panels && hi > options.inner_radius; ++k) {
      panels.emplace_back(hi / 2, hi);
      hi /= 2;
    }
    inner = hi;
  }

  // One unrefined pass fixes the absolute tolerance for the line.
  double scale = 0;
  for (const auto& [lo, hi] : panels) {
    double l1 = 0;
    GK::integrate(g, lo, hi, 0, 0, nullptr, &l1);
    scale += l1;
  }
  const double tol = options.panel_tolerance * std::max(scale, std::numeric_limits<double>::min());

  // Bisection with an absolute tolerance split evenly between halves. The
  // Kronrod value is far more accurate than the Gauss/Kronrod gap it is
  // judged by, so the achieved error is well below `tol`.
  std::function<double(double, double, double, unsigned)> adapt = [&](double lo, double hi, double budget,
                                                                       unsigned depth) {
    double err = 0;
    const double value = GK::integrate(g, lo, hi, 0, 0, &err);
    if (err <= budget || depth == 0) return value;
    const double mid = (lo + hi) / 2;
    return adapt(lo, mid, budget / 2, depth - 1) + adapt(mid, hi, budget / 2, depth - 1);
  };
  double total = 0;
  for (const auto& [lo, hi] : panels) total += adapt(lo, hi, tol / static_cast<double>(panels.size()), options.max_depth);
  if (r_enter > 0) return total;

  // Innermost disc: l(r, u) v(x0 + r u) is constant to O(r) there.
  const double vx0 = v(x0);
  total += kernel.profile(0.0, u) * vx0 * std::pow(inner, e + 1) / (e + 1);
  return total;
}

/// Gauss-Legendre rule on [-1, 1] from Boost's Legendre zeros.
inline void legendre_rule(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  const auto zeros = boost::math::legendre_p_zeros<double>(count);  // non-negative zeros, ascending
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(count, z);
    const double w = 2 / ((1 - z * z) * dp * dp);
    nodes.push_back(z);
    weights.push_back(w);
    if (z != 0) {
      nodes.push_back(-z);
      weights.push_back(w);
    }
  }
}

inline double angular_pass(const SingularKernel& kernel, const SmoothFactor& v, std::span<const double> x0, int resolution,
                           const OracleOptions& options) {
  const int n = kernel.n;
  constexpr double two_pi = 2 * std::numbers::pi;
  if (n == 1) {
    const double plus[1] = {1.0}, minus[1] = {-1.0};
    return radial_line(kernel, v, x0, plus, options) + radial_line(kernel, v, x0, minus, options);
  }
  if (n == 2) {
    double sum = 0;
    for (int j = 0; j < resolution; ++j) {
      const double theta = two_pi * j / resolution;
      const double u[2] = {std::cos(theta), std::sin(theta)};
      sum += radial_line(kernel, v, x0, u, options);
    }
    return sum * two_pi / resolution;
  }
  std::vector<double> z, w;
  legendre_rule(resolution, z, w);
  const int azimuths = 2 * resolution;
  double sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double rho = std::sqrt(1 - z[i] * z[i]);
    double ring = 0;
    for (int j = 0; j < azimuths; ++j) {
      const double phi = two_pi * j / azimuths;
      const double u[3] = {rho * std::cos(phi), rho * std::sin(phi), z[i]};
      ring += radial_line(kernel, v, x0, u, options);
    }
    sum += w[i] * ring * two_pi / azimuths;
  }
  return sum;
}

}  // namespace detail

/// int |x - x0|^gamma l(|x - x0|, u) v(x) dx, refining the angular resolution
/// until two successive values differ by less than `tol`.
inline ReferenceValue reference_integral(const SingularKernel& kernel, const SmoothFactor& v, std::span<const double> x0,
                                         double tol, const OracleOptions& options = {}) {
  kernel.validate();
  require(x0.size() == static_cast<std::size_t>(kernel.n), ErrorKind::invalid_parameters, "x0 dimension mismatch");
  require(tol > 0, ErrorKind::invalid_parameters, "oracle tolerance must be positive");
  ReferenceValue out;
  if (kernel.n == 1) {
    out.value = detail::angular_pass(kernel, v, x0, 0, options);
    return out;
  }
  int resolution = options.initial_resolution;
  double previous = detail::angular_pass(kernel, v, x0, resolution, options);
  double gap = std::numeric_limits<double>::infinity();
  while (resolution * 2 <= options.max_resolution) {
    resolution *= 2;
    const double current = detail::angular_pass(kernel, v, x0, resolution, options);
    gap = std::abs(current - previous);
    previous = current;
    if (gap < tol) {
      out.value = current;
      out.achieved_tolerance = gap;
      out.angular_resolution = resolution;
      return out;
    }
  }
  throw NoConvergence("reference integral did not reach tolerance within the angular budget", previous, gap);
}

/// Observed orders log(e_j / e_{j+1}) / log(h_j / h_{j+1}); pairs involving a
/// zero or non-finite error are reported as undefined.
inline std::vector<std::optional<double>> estimate_order(std::span<const std::pair<double, double>> errors) {
  require(errors.size() >= 2, ErrorKind::invalid_parameters, "order estimation needs at least two (h, error) pairs");
  std::vector<std::optional<double>> out;
  for (std::size_t j = 0; j + 1 < errors.size(); ++j) {
    const auto [h1, e1] = errors[j];
    const auto [h2, e2] = errors[j + 1];
    require(h1 > h2 && h2 > 0, ErrorKind::invalid_parameters, "h values must be positive and strictly decreasing");
    const double a = std::abs(e1), b = std::abs(e2);
    if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b)) {
      out.emplace_back(std::nullopt);
      continue;
    }
    out.emplace_back(std::log(a / b) / std::log(h1 / h2));
  }
  return out;
}

/// Median of the defined orders among the last `count` pairs.
inline std::optional<double> median_of_last(std::span<const std::optional<double>> orders, std::size_t count = 3) {
  std::vector<double> tail;
  const std::size_t first = orders.size() > count ? orders.size() - count : 0;
  for (std::size_t j = first; j < orders.size(); ++j)
    if (orders[j]) tail.push_back(*orders[j]);
  if (tail.empty()) return std::nullopt;
  std::sort(tail.begin(), tail.end());
  const std::size_t mid = tail.size() / 2;
  return tail.size() % 2 ? tail[mid] : 0.5 * (tail[mid - 1] + tail[mid]);
}

}  // namespace singquad
