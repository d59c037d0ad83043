#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "singquad/singquad.hpp"

namespace sqtest {

using namespace singquad;

inline SingularKernel const_kernel(int n, double gamma) {
  return make_kernel(n, gamma, [](std::span<const double>) { return 1.0; }, "const");
}

inline SmoothFactor window(int n, double R) {
  (void)n;
  const auto c = make_standard_cutoff();
  return SmoothFactor{[c, R](std::span<const double> x) { return eval_window(c, R, x); }, R, "window"};
}

/// Window times a cubic with every monomial up to degree 3 present, so no
/// derivative of v at the origin vanishes by accident. `seed` picks the
/// coefficients.
inline SmoothFactor window_cubic(int n, double R, unsigned seed) {
  const auto c = make_standard_cutoff();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  const auto indices = enumerate_multi_indices(3, n);
  std::vector<double> coef;
  for (std::size_t i = 0; i < indices.size(); ++i) coef.push_back((i % 2 ? -1.0 : 1.0) * dist(rng));
  return SmoothFactor{[c, R, indices, coef](std::span<const double> x) {
                        const double w = eval_window(c, R, x);
                        if (w == 0) return 0.0;
                        double s = 0;
                        for (std::size_t i = 0; i < indices.size(); ++i) s += coef[i] * indices[i].monomial(x);
                        return w * s;
                      },
                      R, "window_cubic"};
}

inline SmoothFactor window_exp(int n, double R, std::vector<double> k) {
  (void)n;
  const auto c = make_standard_cutoff();
  return SmoothFactor{[c, R, k](std::span<const double> x) {
                        const double w = eval_window(c, R, x);
                        if (w == 0) return 0.0;
                        double dot = 0;
                        for (std::size_t i = 0; i < x.size(); ++i) dot += k[i] * x[i];
                        return w * std::exp(dot);
                      },
                      R, "window_exp"};
}

inline double reference(const SingularKernel& k, const SmoothFactor& v, const GridContext& g, double tol = 1e-13) {
  const Point x0 = g.singular_point();
  return reference_integral(k, v, std::span<const double>(x0.data(), static_cast<std::size_t>(g.n)), tol).value;
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace sqtest
