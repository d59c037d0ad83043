#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "singquad/errors.hpp"

namespace singquad {

/// Gauss-Legendre nodes and weights on [-1, 1].
template <class Real = long double>
struct GaussLegendre {
  std::vector<Real> nodes;
  std::vector<Real> weights;

  explicit GaussLegendre(int count) : nodes(static_cast<std::size_t>(count)), weights(static_cast<std::size_t>(count)) {
    require(count >= 1, ErrorKind::invalid_parameters, "Gauss-Legendre needs at least one node");
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
      // Tricomi initial guess, then Newton on P_count.
      Real x = std::cos(std::numbers::pi_v<Real> * (Real(i) + Real(0.75)) / (Real(count) + Real(0.5)));
      Real derivative = 0;
      for (int iter = 0; iter < 100; ++iter) {
        Real p0 = 1, p1 = x;
        for (int k = 2; k <= count; ++k) {
          const Real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        derivative = count * (x * p1 - p0) / (x * x - 1);
        const Real step = p1 / derivative;
        x -= step;
        if (std::abs(step) <= 4 * std::numeric_limits<Real>::epsilon()) break;
      }
      // Recompute the derivative at the converged node.
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const Real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      derivative = count * (x * p1 - p0) / (x * x - 1);
      const Real w = 2 / ((1 - x * x) * derivative * derivative);
      nodes[static_cast<std::size_t>(i)] = -x;
      nodes[static_cast<std::size_t>(count - 1 - i)] = x;
      weights[static_cast<std::size_t>(i)] = w;
      weights[static_cast<std::size_t>(count - 1 - i)] = w;
    }
    if (count % 2 == 1) nodes[static_cast<std::size_t>(count / 2)] = 0;
  }

  /// Integral of f over [lo, hi].
  template <class F>
  Real integrate(F&& f, Real lo, Real hi) const {
    const Real mid = (lo + hi) / 2, half = (hi - lo) / 2;
    Real sum = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return half * sum;
  }
};

}  // namespace singquad
