#pragma once

/**
 * @file lattice.hpp
 * @brief Trapezoidal sums over the uniform lattice h Z^n.
 *
 *   T_h[f]      = h^n sum_{y in hZ^n} f(y)
 *   T_h^0[f]    = the same sum without the node h m nearest the singularity
 *   T_h^{0,D}[f] = the same sum without every node h (m + c), c in D
 *
 * The integrand must vanish outside the ball of `support_radius` about the
 * origin; only nodes inside that ball (inflated by one cell) are visited.
 *
 * Partitioning: every lattice row (fixed first index) is reduced into its own
 * compensated accumulator, and the rows are combined in ascending order. The
 * result is therefore bitwise independent of the number of workers.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "singquad/compensated.hpp"
#include "singquad/core.hpp"

namespace singquad {

struct LatticeOptions {
  unsigned workers = 1;
};

/// Integer offsets relative to the grid node m.
using NodeSet = std::vector<IntPoint>;

namespace detail {

inline bool contains_offset(const NodeSet& set, const IntPoint& rel, int n) {
  for (const auto& c : set) {
    bool same = true;
    for (int i = 0; i < n && same; ++i) same = c[static_cast<std::size_t>(i)] == rel[static_cast<std::size_t>(i)];
    if (same) return true;
  }
  return false;
}

/// Multi-output lattice reduction. `f(x, out)` writes one value per output;
/// output j skips the nodes listed in exclusions[j]. A node excluded from
/// every output is never evaluated.
template <class F>
std::vector<CompensatedSum> accumulate(const GridContext& grid, double support_radius,
                                       std::span<const NodeSet> exclusions, F&& f, const LatticeOptions& options) {
  const int n = grid.n;
  const std::size_t outputs = exclusions.size();
  const double h = grid.h;
  require(support_radius >= 0 && std::isfinite(support_radius), ErrorKind::invalid_parameters,
          "support radius must be finite and non-negative");
  const long K = static_cast<long>(std::floor((support_radius + h) / h));
  const double reach2 = (support_radius + h) * (support_radius + h);

  long exclusion_extent = -1;
  for (const auto& set : exclusions)
    for (const auto& c : set)
      for (int i = 0; i < n; ++i) exclusion_extent = std::max(exclusion_extent, std::abs(c[static_cast<std::size_t>(i)]));

  const std::size_t rows = static_cast<std::size_t>(2 * K + 1);
  std::vector<std::vector<CompensatedSum>> row_sums(rows, std::vector<CompensatedSum>(outputs));
  std::vector<std::exception_ptr> row_errors(rows);

  auto process_row = [&](std::size_t row) {
    try {
      IntPoint k{};
      k[0] = static_cast<long>(row) - K;
      Point x{};
      std::vector<double> values(outputs);
      std::vector<char> active(outputs);
      auto& sums = row_sums[row];
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(n));

      auto visit = [&]() {
        double r2 = 0;
        for (int i = 0; i < n; ++i) {
          x[static_cast<std::size_t>(i)] = h * static_cast<double>(k[static_cast<std::size_t>(i)]);
          r2 += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        }
        if (r2 > reach2) return;
        IntPoint rel{};
        long rel_extent = 0;
        for (int i = 0; i < n; ++i) {
          rel[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)] - grid.m[static_cast<std::size_t>(i)];
          rel_extent = std::max(rel_extent, std::abs(rel[static_cast<std::size_t>(i)]));
        }
        bool any = false;
        for (std::size_t j = 0; j < outputs; ++j) {
          active[j] = rel_extent > exclusion_extent || !contains_offset(exclusions[j], rel, n);
          any = any || active[j];
        }
        if (!any) return;
        f(xs, std::span<double>(values));
        for (std::size_t j = 0; j < outputs; ++j) {
          if (!active[j]) continue;
          if (!std::isfinite(values[j]))
            throw EvaluationFailure("non-finite integrand value at lattice node", std::vector<double>(xs.begin(), xs.end()));
          sums[j].add(values[j]);
        }
      };

      if (n == 1) {
        visit();
      } else if (n == 2) {
        for (k[1] = -K; k[1] <= K; ++k[1]) visit();
      } else {
        for (k[1] = -K; k[1] <= K; ++k[1])
          for (k[2] = -K; k[2] <= K; ++k[2]) visit();
      }
    } catch (...) {
      row_errors[row] = std::current_exception();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(rows)));
  if (workers == 1) {
    for (std::size_t row = 0; row < rows; ++row) process_row(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t row = next++; row < rows; row = next++) process_row(row);
      });
    for (auto& t : pool) t.join();
  }

  for (const auto& err : row_errors)
    if (err) std::rethrow_exception(err);

  std::vector<CompensatedSum> total(outputs);
  for (const auto& sums : row_sums)
    for (std::size_t j = 0; j < outputs; ++j) total[j].add(sums[j]);
  return total;
}

inline double cell_volume(const GridContext& grid) { return std::pow(grid.h, grid.n); }

template <class F>
double scalar_sum(F&& f, double support_radius, const GridContext& grid, const NodeSet& excluded,
                  const LatticeOptions& options) {
  const NodeSet sets[1] = {excluded};
  auto wrapped = [&](std::span<const double> x, std::span<double> out) { out[0] = f(x); };
  const auto sums = accumulate(grid, support_radius, std::span<const NodeSet>(sets, 1), wrapped, options);
  return cell_volume(grid) * sums[0].value();
}

}  // namespace detail

/// The origin-only exclusion set {0}.
inline NodeSet origin_node() { return NodeSet{IntPoint{}}; }

/// h^n sum over all lattice nodes.
template <class F>
double trapezoid(F&& f, double support_radius, const GridContext& grid, const LatticeOptions& options = {}) {
  return detail::scalar_sum(f, support_radius, grid, NodeSet{}, options);
}

/// h^n sum over all lattice nodes except h m. The integrand is never
/// evaluated at the excluded node.
template <class F>
double punctured_trapezoid(F&& f, double support_radius, const GridContext& grid, const LatticeOptions& options = {}) {
  return detail::scalar_sum(f, support_radius, grid, origin_node(), options);
}

/// h^n sum over all lattice nodes except h (m + c) for c in the stencil.
template <class F>
double stencil_punctured_trapezoid(F&& f, double support_radius, const GridContext& grid, const NodeSet& stencil,
                                   const LatticeOptions& options = {}) {
  require(detail::contains_offset(stencil, IntPoint{}, grid.n), ErrorKind::invalid_parameters,
          "stencil must contain the origin");
  return detail::scalar_sum(f, support_radius, grid, stencil, options);
}

/// Several sums in one lattice pass, each with its own exclusion set.
/// Returned values are scaled by h^n and carried in extended precision.
template <class F>
std::vector<long double> lattice_sums(F&& f, double support_radius, const GridContext& grid,
                                      std::span<const NodeSet> exclusions, const LatticeOptions& options = {}) {
  const auto sums = detail::accumulate(grid, support_radius, exclusions, f, options);
  const long double volume = std::pow(static_cast<long double>(grid.h), grid.n);
  std::vector<long double> out;
  out.reserve(sums.size());
  for (const auto& s : sums) out.push_back(volume * s.extended());
  return out;
}

}  // namespace singquad
