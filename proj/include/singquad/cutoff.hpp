#pragma once

#include <cmath>
#include <span>
#include <string>

#include "singquad/core.hpp"

namespace singquad {

/// Radial C-infinity cutoff: 1 on [0, a], 0 on [b, inf), monotone in between.
///
/// The transition is the exponential partition of unity
///   g(t) = e(t) / (e(t) + e(1 - t)),  e(t) = exp(-1/t) for t > 0, else 0,
/// evaluated at t = (b - r) / (b - a).
struct RadialCutoff {
  double a = 0.75;
  double b = 1.0;

  static constexpr const char* profile_id = "exp_partition";

  template <class Real>
  Real operator()(Real r) const {
    if (r <= Real(a)) return Real(1);
    if (r >= Real(b)) return Real(0);
    const Real t = (Real(b) - r) / (Real(b) - Real(a));
    // g(t) = 1 / (1 + exp(1/t - 1/(1-t))), stable for t in (0, 1).
    const Real exponent = Real(1) / t - Real(1) / (Real(1) - t);
    if (exponent > Real(700)) return Real(0);
    return Real(1) / (Real(1) + std::exp(exponent));
  }
};

/// Cutoff with plateau radius a and support radius b.
inline RadialCutoff make_standard_cutoff(double a = 0.75, double b = 1.0) {
  require(a > 0 && a < b, ErrorKind::invalid_parameters, "cutoff needs 0 < a < b");
  return RadialCutoff{a, b};
}

/// psi_R(x) = profile(|x| / R).
inline double eval_window(const RadialCutoff& cutoff, double R, std::span<const double> x) {
  require(R > 0, ErrorKind::invalid_parameters, "window scale must be positive");
  return cutoff(norm(x) / R);
}

}  // namespace singquad
