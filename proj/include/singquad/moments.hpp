#pragma once

/**
 * @file moments.hpp
 * @brief Singular moments  I[s0 P_beta] = int |x|^gamma l0(x/|x|) x^beta psi(|x|/L) dx.
 *
 * With a radial window the integral factorises in polar coordinates:
 *
 *   I = ( int_0^inf r^e psi(r/L) dr ) * ( int_{S^{n-1}} l0(u) u^beta du ),
 *   e = gamma + |beta| + n - 1.
 *
 * The radial factor is exact on the plateau [0, aL] and uses Gauss-Legendre
 * on the C-infinity transition [aL, bL], so r = 0 is never sampled.
 */

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "singquad/core.hpp"
#include "singquad/cutoff.hpp"
#include "singquad/gauss_legendre.hpp"

namespace singquad {

inline constexpr int kDefaultAngularResolution2D = 64;
inline constexpr int kDefaultAngularResolution3D = 24;
inline constexpr int kDefaultGluePoints = 96;

inline int default_angular_resolution(int n) { return n == 3 ? kDefaultAngularResolution3D : kDefaultAngularResolution2D; }

/// Quadrature on the unit sphere S^{n-1}. Nodes and weights are kept in
/// extended precision.
struct AngularRule {
  int n = 1;
  int resolution = 0;
  std::vector<std::array<long double, kMaxDimension>> nodes;
  std::vector<long double> weights;

  std::size_t size() const noexcept { return weights.size(); }

  long double total_weight() const {
    long double s = 0;
    for (auto w : weights) s += w;
    return s;
  }
};

/// n = 1: the two points of S^0.  n = 2: `resolution` equispaced angles.
/// n = 3: Gauss-Legendre in cos(theta) x 2*resolution equispaced azimuths.
inline AngularRule angular_rule(int n, int resolution) {
  require(n >= 1 && n <= 3, ErrorKind::invalid_parameters, "angular rules exist for n = 1, 2, 3");
  require(resolution >= 1, ErrorKind::invalid_parameters, "angular resolution must be positive");
  AngularRule rule;
  rule.n = n;
  rule.resolution = resolution;
  constexpr long double two_pi = 2 * std::numbers::pi_v<long double>;
  if (n == 1) {
    rule.nodes = {{-1.0L, 0, 0}, {1.0L, 0, 0}};
    rule.weights = {1.0L, 1.0L};
  } else if (n == 2) {
    for (int j = 0; j < resolution; ++j) {
      const long double theta = two_pi * j / resolution;
      rule.nodes.push_back({std::cos(theta), std::sin(theta), 0});
      rule.weights.push_back(two_pi / resolution);
    }
  } else {
    const GaussLegendre<long double> polar(resolution);
    const int azimuths = 2 * resolution;
    for (int i = 0; i < resolution; ++i) {
      const long double z = polar.nodes[static_cast<std::size_t>(i)];
      const long double rho = std::sqrt(1 - z * z);
      for (int j = 0; j < azimuths; ++j) {
        const long double phi = two_pi * j / azimuths;
        rule.nodes.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
        rule.weights.push_back(polar.weights[static_cast<std::size_t>(i)] * two_pi / azimuths);
      }
    }
  }
  return rule;
}

/// int_0^inf r^e profile(r/L) dr, e > -1.
template <class Real = double>
Real radial_moment(double exponent, const RadialCutoff& cutoff, double L, int glue_points = kDefaultGluePoints) {
  if (!(exponent > -1))
    throw Error(ErrorKind::non_integrable_moment, "radial moment needs exponent > -1");
  require(L > 0 && glue_points >= 1, ErrorKind::invalid_parameters, "radial moment needs L > 0 and glue_points >= 1");
  using Ext = long double;
  const Ext e = exponent;
  const Ext lo = static_cast<Ext>(cutoff.a) * L;
  const Ext hi = static_cast<Ext>(cutoff.b) * L;
  const Ext plateau = std::pow(lo, e + 1) / (e + 1);
  const GaussLegendre<Ext> rule(glue_points);
  const Ext transition = rule.integrate([&](Ext r) { return std::pow(r, e) * cutoff(r / static_cast<Ext>(L)); }, lo, hi);
  return static_cast<Real>(plateau + transition);
}

/// int_{S^{n-1}} l0(u) u^beta du with the given angular rule.
inline long double angular_moment(const AngularFn& angular, const MultiIndex& beta, const AngularRule& rule) {
  require(beta.dimension() == rule.n, ErrorKind::invalid_parameters, "multi-index and angular rule dimensions differ");
  long double sum = 0;
  std::array<double, kMaxDimension> u{};
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const auto& node = rule.nodes[j];
    for (int i = 0; i < rule.n; ++i) u[static_cast<std::size_t>(i)] = static_cast<double>(node[static_cast<std::size_t>(i)]);
    const long double l0 = angular(std::span<const double>(u.data(), static_cast<std::size_t>(rule.n)));
    sum += rule.weights[j] * l0 * beta.monomial(std::span<const long double>(node.data(), static_cast<std::size_t>(rule.n)));
  }
  return sum;
}

/// I[s0 P_beta] for an r-independent kernel.
template <class Real = double>
Real moment_integral(const SingularKernel& kernel, const MultiIndex& beta, const RadialCutoff& cutoff, double L,
                     const AngularRule& angular, int glue_points = kDefaultGluePoints) {
  require(kernel.n == angular.n, ErrorKind::invalid_parameters, "kernel and angular rule dimensions differ");
  const double exponent = kernel.gamma + beta.order() + kernel.n - 1;
  const long double radial = radial_moment<long double>(exponent, cutoff, L, glue_points);
  return static_cast<Real>(radial * angular_moment(kernel.angular, beta, angular));
}

}  // namespace singquad
