// Integrates |x - x0|^{-1} v(x) in the plane with the punctured and the
// corrected trapezoidal rules and prints the errors against the oracle.

#include <cstdio>

#include "singquad/singquad.hpp"

using namespace singquad;

int main() {
  const auto kernel = make_kernel(2, -1.0, [](std::span<const double>) { return 1.0; }, "const");
  const auto cutoff = make_standard_cutoff();
  const SmoothFactor v{[cutoff](std::span<const double> x) {
                         return (1 + x[0] - 2 * x[1] + x[0] * x[1]) * eval_window(cutoff, 2.0, x);
                       },
                       2.0, "demo"};

  const double alpha[2] = {0.3, -0.2};
  MemoizingWeightProvider weights;

  std::printf("%8s %14s %14s %14s\n", "h", "punctured", "p = 1", "p = 2");
  for (double h : {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80}) {
    const auto grid = GridContext::centered(2, h, alpha, 1.0, v.support_radius);
    const Point x0 = grid.singular_point();
    const double exact = reference_integral(kernel, v, std::span<const double>(x0.data(), 2), 1e-13).value;
    const double e0 = punctured_rule(kernel, v, grid) - exact;
    const double e1 = corrected_rule(kernel, v, grid, weights(kernel, 1, alpha)) - exact;
    const double e2 = corrected_rule(kernel, v, grid, weights(kernel, 2, alpha)) - exact;
    std::printf("%8.4f %14.3e %14.3e %14.3e\n", h, e0, e1, e2);
  }
}
