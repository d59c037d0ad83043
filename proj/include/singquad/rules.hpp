#pragma once

/**
 * @file rules.hpp
 * @brief Corrected and composite corrected trapezoidal rules.
 *
 * Corrected rule of order p for f0(x) = |x - x0|^gamma l0(u) v(x):
 *
 *   S_h^p[f0] = T_h^0[f0] + h^{gamma + n} sum_i omega_i v(h (m + c_i))
 *
 * Composite rule for f(x) = |x - x0|^gamma l(|x - x0|, u) v(x), with
 * l(r, u) = sum_k r^k phi_k(u) + O(r^{p+1}):
 *
 *   Q_h^p[f] = sum_k S_h^{p-k}[|x - x0|^{gamma+k} phi_k(u) v]
 *            + T_h^0[f - sum_k |x - x0|^{gamma+k} phi_k(u) v]
 */

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "singquad/core.hpp"
#include "singquad/lattice.hpp"
#include "singquad/weights.hpp"

namespace singquad {

/// Produces weights for a term kernel (exponent gamma + k, angular phi_k) of
/// order p - k at offset alpha.
using WeightProvider = std::function<WeightSet(const SingularKernel&, int, std::span<const double>)>;

namespace detail {

inline void check_compatible(const SingularKernel& kernel, const GridContext& grid, const WeightSet& weights) {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::incompatible_weights, what); };
  if (weights.n() != grid.n || kernel.n != grid.n) fail("dimension mismatch between kernel, grid and weights");
  if (std::abs(weights.gamma - kernel.gamma) > 1e-14 * std::max(1.0, std::abs(kernel.gamma)))
    fail("weights were computed for gamma = " + std::to_string(weights.gamma) + ", kernel has " + std::to_string(kernel.gamma));
  if (!weights.kernel_id.empty() && !kernel.id.empty() && weights.kernel_id != kernel.id)
    fail("weights were computed for kernel '" + weights.kernel_id + "', not '" + kernel.id + "'");
  for (int i = 0; i < grid.n; ++i)
    if (std::abs(weights.alpha[static_cast<std::size_t>(i)] - grid.alpha[static_cast<std::size_t>(i)]) > 1e-12)
      fail("weights were computed for a different alpha");
  if (weights.omega.size() != weights.stencil.size()) fail("weight vector and stencil sizes differ");
}

/// h^{gamma + n} sum_i omega_i v(h (m + c_i)).
inline double correction_sum(const SmoothFactor& v, const GridContext& grid, const WeightSet& weights, double gamma) {
  CompensatedSum sum;
  Point x{};
  for (std::size_t i = 0; i < weights.omega.size(); ++i) {
    const auto& c = weights.stencil.points[i];
    for (int d = 0; d < grid.n; ++d)
      x[static_cast<std::size_t>(d)] = grid.h * static_cast<double>(grid.m[static_cast<std::size_t>(d)] + c[static_cast<std::size_t>(d)]);
    sum.add(weights.omega[i] * v(std::span<const double>(x.data(), static_cast<std::size_t>(grid.n))));
  }
  return std::pow(grid.h, gamma + grid.n) * sum.value();
}

/// Polar decomposition of x - x0; returns r and writes u.
inline double polar(std::span<const double> x, const Point& x0, int n, Point& u) {
  double r2 = 0;
  for (int i = 0; i < n; ++i) {
    u[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - x0[static_cast<std::size_t>(i)];
    r2 += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
  }
  const double r = std::sqrt(r2);
  for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] /= r;
  return r;
}

}  // namespace detail

/// Punctured trapezoidal rule applied to |x - x0|^gamma l(|x - x0|, u) v(x).
inline double punctured_rule(const SingularKernel& kernel, const SmoothFactor& v, const GridContext& grid,
                             const LatticeOptions& options = {}) {
  require(kernel.n == grid.n, ErrorKind::invalid_parameters, "kernel and grid dimensions differ");
  const Point x0 = grid.singular_point();
  auto f = [&](std::span<const double> x) {
    const double vx = v(x);
    if (vx == 0) return 0.0;
    Point u{};
    const double r = detail::polar(x, x0, grid.n, u);
    return std::pow(r, kernel.gamma) * kernel.profile(r, std::span<const double>(u.data(), static_cast<std::size_t>(grid.n))) * vx;
  };
  return punctured_trapezoid(f, v.support_radius, grid, options);
}

/// S_h^p[f0] for an r-independent kernel.
inline double corrected_rule(const SingularKernel& kernel, const SmoothFactor& v, const GridContext& grid,
                             const WeightSet& weights, const LatticeOptions& options = {}) {
  require(kernel.r_independent(), ErrorKind::invalid_parameters, "corrected rule needs an r-independent kernel");
  detail::check_compatible(kernel, grid, weights);
  const Point x0 = grid.singular_point();
  const int n = grid.n;
  auto f = [&](std::span<const double> x) {
    const double vx = v(x);
    if (vx == 0) return 0.0;
    Point u{};
    const double r = detail::polar(x, x0, n, u);
    return std::pow(r, kernel.gamma) * kernel.angular(std::span<const double>(u.data(), static_cast<std::size_t>(n))) * vx;
  };
  const double lattice = weights.puncture == PunctureMode::origin
                             ? punctured_trapezoid(f, v.support_radius, grid, options)
                             : stencil_punctured_trapezoid(f, v.support_radius, grid, weights.stencil.points, options);
  return lattice + detail::correction_sum(v, grid, weights, kernel.gamma);
}

/// Kernel of the k-th expansion term: exponent gamma + k, angular phi_k.
inline SingularKernel expansion_term_kernel(const SingularKernel& kernel, int k) {
  require(k >= 0 && static_cast<std::size_t>(k) < std::max<std::size_t>(1, kernel.radial_expansion.size()),
          ErrorKind::insufficient_expansion, "missing expansion term phi_" + std::to_string(k));
  if (kernel.r_independent()) return make_kernel(kernel.n, kernel.gamma, kernel.angular, kernel.id);
  return make_kernel(kernel.n, kernel.gamma + k, kernel.radial_expansion[static_cast<std::size_t>(k)],
                     kernel.id + "/phi" + std::to_string(k));
}

/// Q_h^p[f]. For an r-independent kernel the expansion is l0 alone and the
/// rule reduces to the corrected rule of order p.
inline double composite_rule(const SingularKernel& kernel, const SmoothFactor& v, const GridContext& grid,
                             const WeightProvider& provider, int p, const LatticeOptions& options = {}) {
  require(p >= 0, ErrorKind::invalid_parameters, "composite rule order must be >= 0");
  require(kernel.n == grid.n, ErrorKind::invalid_parameters, "kernel and grid dimensions differ");
  const int n = grid.n;
  const std::size_t terms = kernel.r_independent() ? 1 : static_cast<std::size_t>(p) + 1;
  if (!kernel.r_independent() && kernel.radial_expansion.size() < terms)
    throw Error(ErrorKind::insufficient_expansion, "composite rule of order " + std::to_string(p) + " needs phi_0..phi_" +
                                                      std::to_string(p) + ", kernel supplies " +
                                                      std::to_string(kernel.radial_expansion.size()));

  std::vector<SingularKernel> term_kernels;
  std::vector<WeightSet> term_weights;
  for (std::size_t k = 0; k < terms; ++k) {
    term_kernels.push_back(expansion_term_kernel(kernel, static_cast<int>(k)));
    const int order = kernel.r_independent() ? p : p - static_cast<int>(k);
    term_weights.push_back(provider(term_kernels.back(), order, grid.alpha_span()));
    detail::check_compatible(term_kernels.back(), grid, term_weights.back());
  }

  double corrections = 0;
  for (std::size_t k = 0; k < terms; ++k)
    corrections += detail::correction_sum(v, grid, term_weights[k], term_kernels[k].gamma);

  const Point x0 = grid.singular_point();
  bool all_origin = true;
  for (const auto& w : term_weights) all_origin = all_origin && w.puncture == PunctureMode::origin;

  if (all_origin) {
    // The punctured parts of every term and the remainder add up to T_h^0[f].
    auto f = [&](std::span<const double> x) {
      const double vx = v(x);
      if (vx == 0) return 0.0;
      Point u{};
      const double r = detail::polar(x, x0, n, u);
      return std::pow(r, kernel.gamma) * kernel.profile(r, std::span<const double>(u.data(), static_cast<std::size_t>(n))) * vx;
    };
    return punctured_trapezoid(f, v.support_radius, grid, options) + corrections;
  }

  // Terms punctured at their own stencils; the remainder at the origin.
  std::vector<NodeSet> exclusions;
  for (const auto& w : term_weights) exclusions.push_back(detail::puncture_set(w.puncture, w.stencil));
  exclusions.push_back(origin_node());
  auto f = [&](std::span<const double> x, std::span<double> out) {
    const double vx = v(x);
    if (vx == 0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    Point u{};
    const double r = detail::polar(x, x0, n, u);
    const std::span<const double> us(u.data(), static_cast<std::size_t>(n));
    double expansion = 0;
    for (std::size_t k = 0; k < terms; ++k) {
      out[k] = std::pow(r, term_kernels[k].gamma) * term_kernels[k].angular(us) * vx;
      expansion += out[k];
    }
    out[terms] = std::pow(r, kernel.gamma) * kernel.profile(r, us) * vx - expansion;
  };
  const auto sums = lattice_sums(f, v.support_radius, grid, std::span<const NodeSet>(exclusions), options);
  long double lattice = 0;
  for (auto s : sums) lattice += s;
  return static_cast<double>(lattice) + corrections;
}

/// Weight provider that synthesises on demand and caches by
/// (kernel id, gamma, order, alpha). Safe to share between threads.
class MemoizingWeightProvider {
 public:
  explicit MemoizingWeightProvider(WeightOptions options = {}) : options_(std::move(options)) {}

  WeightSet operator()(const SingularKernel& kernel, int order, std::span<const double> alpha) {
    Key key{kernel.id, kernel.gamma, order, {}};
    std::copy(alpha.begin(), alpha.end(), std::get<3>(key).begin());
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    WeightSet w = solve_weights(kernel, default_stencil(order, kernel.n), alpha, options_);
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, std::move(w)).first->second;
  }

  std::size_t cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

  /// Adapter usable wherever a WeightProvider is expected. The provider must
  /// outlive the returned function.
  WeightProvider as_provider() {
    return [this](const SingularKernel& k, int order, std::span<const double> alpha) { return (*this)(k, order, alpha); };
  }

 private:
  using Key = std::tuple<std::string, double, int, Point>;
  WeightOptions options_;
  mutable std::mutex mutex_;
  std::map<Key, WeightSet> cache_;
};

/// Expansion terms phi_k(u) = (1/k!) d^k l / dr^k (0, u), k = 0..p, estimated by
/// central differences on the symmetric nodes j * step, |j| <= p/2 + 2.
/// Requires l to be defined for small negative r. Lower accuracy than
/// analytic phi_k; kernels built from it carry the suffix "+fd" in their id.
inline std::vector<AngularFn> expansion_by_differences(const RadialAngularFn& full, int p, double step) {
  require(p >= 0 && step > 0, ErrorKind::invalid_parameters, "finite-difference expansion needs p >= 0, step > 0");
  const int half = p / 2 + 2;
  const int points = 2 * half + 1;
  // Taylor coefficient weights: solve sum_j w_j (j step)^q = delta_{q,k}.
  Eigen::MatrixXd A(points, points);
  for (int q = 0; q < points; ++q)
    for (int j = 0; j < points; ++j) A(q, j) = std::pow(static_cast<double>(j - half), q);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  std::vector<AngularFn> out;
  for (int k = 0; k <= p; ++k) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(points);
    rhs(k) = 1.0 / std::pow(step, k);
    const Eigen::VectorXd w = lu.solve(rhs);
    std::vector<double> weights(w.data(), w.data() + points);
    out.push_back([full, weights, half, step](std::span<const double> u) {
      double s = 0;
      for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * full((static_cast<int>(j) - half) * step, u);
      return s;
    });
  }
  return out;
}

/// Expanded kernel whose phi_k come from finite differences of l with step
/// 1e-3 L'.
inline SingularKernel make_expanded_kernel_fd(int n, double gamma, RadialAngularFn full, int p, double Lprime,
                                              std::string id = "custom") {
  require(std::isfinite(Lprime) && Lprime > 0, ErrorKind::invalid_parameters,
          "finite-difference expansion needs a finite validity radius L'");
  auto expansion = expansion_by_differences(full, p, 1e-3 * Lprime);
  return make_expanded_kernel(n, gamma, std::move(full), std::move(expansion), id + "+fd", Lprime);
}

}  // namespace singquad
