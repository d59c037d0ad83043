#pragma once

/**
 * @file weights.hpp
 * @brief Correction weights for the corrected trapezoidal rule.
 *
 * For a stencil D = {c_i} of pi(p) lattice offsets and an offset alpha, the
 * level-h weights solve K omega(h) = V(h) with
 *
 *   K[j][i] = (c_i - alpha)^{nu_j},
 *   V[j]    = R_{nu_j}(h) = (I - T_h^0)[s0(. - h alpha) P_{nu_j}(. - h alpha)] / h^{gamma + n + |nu_j|},
 *   P_beta(x) = x^beta psi(|x| / L).
 *
 * The weights used by the rule are the limit h -> 0 of omega(h), estimated
 * from a ladder of decreasing h.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "singquad/core.hpp"
#include "singquad/cutoff.hpp"
#include "singquad/lattice.hpp"
#include "singquad/moments.hpp"

namespace singquad {

inline constexpr double kConditionThreshold = 1e12;

/// Which lattice nodes the rule leaves out of the trapezoidal sum.
enum class PunctureMode {
  origin,   ///< only the node nearest the singularity
  stencil,  ///< every correction node
};

/// How the weight limit is estimated from the ladder.
enum class Extrapolation {
  none,        ///< the finest ladder level
  richardson,  ///< componentwise first-order Richardson
};

inline std::string to_string(PunctureMode mode) { return mode == PunctureMode::origin ? "origin" : "stencil"; }
inline std::string to_string(Extrapolation mode) { return mode == Extrapolation::none ? "none" : "richardson"; }

/// Correction nodes D = {c_i}, |D| = pi(p).
struct Stencil {
  int n = 1;
  int p = 0;
  NodeSet points;

  std::size_t size() const noexcept { return points.size(); }

  double max_norm() const {
    double out = 0;
    for (const auto& c : points) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += static_cast<double>(c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)]);
      out = std::max(out, std::sqrt(s));
    }
    return out;
  }

  void validate() const {
    require(n >= 1 && n <= kMaxDimension && p >= 0, ErrorKind::invalid_parameters, "stencil needs 1 <= n <= 3, p >= 0");
    require(points.size() == pi_count(p, n), ErrorKind::invalid_parameters, "stencil size must equal pi(p)");
    require(detail::contains_offset(points, IntPoint{}, n), ErrorKind::invalid_parameters, "stencil must contain 0");
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        require(points[i] != points[j], ErrorKind::invalid_parameters, "stencil points must be distinct");
  }
};

/// {c in N_0^n : |c|_1 <= p} in graded lexicographic order.
inline Stencil default_stencil(int p, int n) {
  Stencil s;
  s.n = n;
  s.p = p;
  for (const auto& nu : enumerate_multi_indices(p, n)) {
    IntPoint c{};
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = nu[i];
    s.points.push_back(c);
  }
  return s;
}

/// Stencil from explicit points; validated.
inline Stencil make_stencil(int n, int p, NodeSet points) {
  Stencil s{n, p, std::move(points)};
  s.validate();
  return s;
}

using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct MomentMatrix {
  Matrix K;
  double condition_number = std::numeric_limits<double>::infinity();
};

/// K[j][i] = (c_i - alpha)^{nu_j}, with its 2-norm condition number.
inline MomentMatrix assemble_K(const Stencil& stencil, std::span<const double> alpha, const std::vector<MultiIndex>& indices) {
  require(indices.size() == stencil.size(), ErrorKind::invalid_parameters, "need as many multi-indices as stencil points");
  require(alpha.size() == static_cast<std::size_t>(stencil.n), ErrorKind::invalid_parameters, "alpha dimension mismatch");
  const auto size = static_cast<Eigen::Index>(stencil.size());
  MomentMatrix out;
  out.K.resize(size, size);
  std::array<long double, kMaxDimension> shifted{};
  for (Eigen::Index i = 0; i < size; ++i) {
    const auto& c = stencil.points[static_cast<std::size_t>(i)];
    for (int d = 0; d < stencil.n; ++d)
      shifted[static_cast<std::size_t>(d)] = static_cast<long double>(c[static_cast<std::size_t>(d)]) - static_cast<long double>(alpha[static_cast<std::size_t>(d)]);
    for (Eigen::Index j = 0; j < size; ++j)
      out.K(j, i) = indices[static_cast<std::size_t>(j)].monomial(std::span<const long double>(shifted.data(), static_cast<std::size_t>(stencil.n)));
  }
  const Eigen::JacobiSVD<Matrix> svd(out.K);
  const auto& sigma = svd.singularValues();
  const long double smallest = sigma(sigma.size() - 1);
  out.condition_number = smallest > 0 ? static_cast<double>(sigma(0) / smallest) : std::numeric_limits<double>::infinity();
  return out;
}

/// Numerical settings for weight synthesis. Zero-valued fields take defaults.
struct WeightOptions {
  std::vector<double> ladder;  ///< strictly decreasing h values
  double tol = 1e-6;           ///< convergence threshold on successive estimates (inf-norm)
  double L = 0;                ///< window radius; default max(2, (4/3) h0 max|c_i|)
  double h0 = 0;               ///< spacing bound; default min(1, 2 h_max)
  RadialCutoff cutoff{};
  int angular_resolution = 0;
  int glue_points = kDefaultGluePoints;
  PunctureMode puncture = PunctureMode::origin;
  Extrapolation extrapolation = Extrapolation::none;
  unsigned workers = 1;
};

/// h_base 2^{-j}, j = 0..levels-1; h_base = 1/16 for n <= 2 and 1/8 for n = 3.
/// Five levels by default in n <= 2, four in n = 3.
inline std::vector<double> default_ladder(int n, int levels = 0) {
  const double base = n == 3 ? 1.0 / 8 : 1.0 / 16;
  if (levels <= 0) levels = n == 3 ? 4 : 5;
  std::vector<double> out;
  for (int j = 0; j < levels; ++j) out.push_back(std::ldexp(base, -j));
  return out;
}

struct ResolvedWeightOptions {
  std::vector<double> ladder;
  double h0;
  double L;
  int angular_resolution;
};

inline ResolvedWeightOptions resolve(const WeightOptions& options, int n, double max_stencil_norm) {
  ResolvedWeightOptions r;
  r.ladder = options.ladder.empty() ? default_ladder(n) : options.ladder;
  require(!r.ladder.empty(), ErrorKind::invalid_parameters, "weight ladder is empty");
  for (std::size_t j = 0; j < r.ladder.size(); ++j) {
    require(r.ladder[j] > 0, ErrorKind::invalid_parameters, "ladder spacings must be positive");
    if (j > 0) require(r.ladder[j] < r.ladder[j - 1], ErrorKind::invalid_parameters, "ladder must be strictly decreasing");
  }
  r.h0 = options.h0 > 0 ? options.h0 : std::min(1.0, 2 * r.ladder.front());
  r.L = options.L > 0 ? options.L : std::max(2.0, (4.0 / 3.0) * r.h0 * max_stencil_norm);
  r.angular_resolution = options.angular_resolution > 0 ? options.angular_resolution : default_angular_resolution(n);
  return r;
}

struct LadderLevel {
  double h = 0;
  std::vector<double> omega;
  std::vector<double> rhs;        ///< V(h)
  double residual_norm = 0;       ///< ||K omega(h) - V(h)||_inf / ||V(h)||_inf
};

/// Correction weights for one (kernel, alpha, p) together with the synthesis
/// record needed to reproduce them.
struct WeightSet {
  Stencil stencil;
  std::vector<double> omega;
  Point alpha{};
  double gamma = 0;
  std::string kernel_id;
  std::map<std::string, double> kernel_params;
  std::vector<LadderLevel> ladder;
  double residual_norm = 0;  ///< relative residual at the finest level
  double condition_number = 0;
  double stability = 0;      ///< inf-norm gap between the last two estimates
  bool converged = false;
  bool interpolated = false;
  bool near_tie = false;     ///< interpolated within one cell of |alpha_i| = 1/2

  // Synthesis metadata.
  double L = 0;
  double h0 = 0;
  RadialCutoff cutoff{};
  int angular_resolution = 0;
  int glue_points = kDefaultGluePoints;
  PunctureMode puncture = PunctureMode::origin;
  Extrapolation extrapolation = Extrapolation::none;

  int n() const noexcept { return stencil.n; }
  int order() const noexcept { return stencil.p; }
  std::span<const double> alpha_span() const { return {alpha.data(), static_cast<std::size_t>(stencil.n)}; }

  /// Copy whose weights are the level-j values omega(h_j).
  WeightSet at_level(std::size_t j) const {
    require(j < ladder.size(), ErrorKind::out_of_range, "ladder level out of range");
    WeightSet out = *this;
    out.omega = ladder[j].omega;
    return out;
  }
};

namespace detail {

inline NodeSet puncture_set(PunctureMode mode, const Stencil& stencil) {
  return mode == PunctureMode::origin ? origin_node() : stencil.points;
}

/// (I - T)[s0(. - h alpha) P_beta(. - h alpha)] / h^{gamma + n + |beta|} for every
/// beta, with one lattice pass.
inline std::vector<long double> R_vector(const SingularKernel& kernel, const std::vector<MultiIndex>& indices,
                                         const GridContext& grid, const RadialCutoff& cutoff, const NodeSet& excluded,
                                         const AngularRule& angular, int glue_points, unsigned workers) {
  require(kernel.r_independent(), ErrorKind::invalid_parameters, "weights need an r-independent kernel");
  require(kernel.n == grid.n, ErrorKind::invalid_parameters, "kernel and grid dimensions differ");
  const int n = grid.n;
  const double h = grid.h;
  const double L = grid.L;
  const double gamma = kernel.gamma;
  const double outer = cutoff.b * L;

  std::vector<long double> exact;
  exact.reserve(indices.size());
  for (const auto& beta : indices) exact.push_back(moment_integral<long double>(kernel, beta, cutoff, L, angular, glue_points));

  const std::vector<NodeSet> exclusions(indices.size(), excluded);
  auto integrand = [&](std::span<const double> x, std::span<double> out) {
    std::array<double, kMaxDimension> z{};
    double r2 = 0;
    for (int i = 0; i < n; ++i) {
      z[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - h * grid.alpha[static_cast<std::size_t>(i)];
      r2 += z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
    }
    const double r = std::sqrt(r2);
    if (r >= outer) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    std::array<double, kMaxDimension> u{};
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] / r;
    const double base = std::pow(r, gamma) * kernel.angular(std::span<const double>(u.data(), static_cast<std::size_t>(n))) * cutoff(r / L);
    const std::span<const double> zs(z.data(), static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < indices.size(); ++j) out[j] = base * indices[j].monomial(zs);
  };
  const double support = L * cutoff.b + h * std::sqrt(static_cast<double>(n)) / 2;
  const auto sums = lattice_sums(integrand, support, grid, std::span<const NodeSet>(exclusions), LatticeOptions{workers});

  std::vector<long double> R(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const long double scale = std::pow(static_cast<long double>(h), static_cast<long double>(gamma) + n + indices[j].order());
    R[j] = (exact[j] - sums[j]) / scale;
  }
  return R;
}

}  // namespace detail

/// R_beta(h) for a single multi-index, punctured at the origin.
inline double compute_R_beta(const SingularKernel& kernel, const MultiIndex& beta, const GridContext& grid,
                             const RadialCutoff& cutoff, int angular_resolution = 0,
                             int glue_points = kDefaultGluePoints, unsigned workers = 1) {
  const AngularRule angular =
      angular_rule(grid.n, angular_resolution > 0 ? angular_resolution : default_angular_resolution(grid.n));
  return static_cast<double>(
      detail::R_vector(kernel, {beta}, grid, cutoff, origin_node(), angular, glue_points, workers).front());
}

/// Solves K omega(h) = V(h) along the ladder and estimates the limit weights.
///
/// Throws stencil-degenerate when cond(K) exceeds 1e12 and no-convergence
/// when successive estimates never agree to `options.tol`.
inline WeightSet solve_weights(const SingularKernel& kernel, const Stencil& stencil, std::span<const double> alpha,
                               const WeightOptions& options = {}) {
  kernel.validate();
  require(kernel.r_independent(), ErrorKind::invalid_parameters, "weights need an r-independent kernel");
  stencil.validate();
  require(kernel.n == stencil.n, ErrorKind::invalid_parameters, "kernel and stencil dimensions differ");
  require(alpha.size() == static_cast<std::size_t>(stencil.n), ErrorKind::invalid_parameters, "alpha dimension mismatch");

  const int n = stencil.n;
  const auto settings = resolve(options, n, stencil.max_norm());
  const auto indices = enumerate_multi_indices(stencil.p, n);
  const MomentMatrix moments = assemble_K(stencil, alpha, indices);
  if (!(moments.condition_number <= kConditionThreshold))
    throw Error(ErrorKind::stencil_degenerate,
                "moment matrix K is singular or ill-conditioned (cond = " + format_number(moments.condition_number) + ")");
  const Eigen::FullPivLU<Matrix> lu(moments.K);
  const AngularRule angular = angular_rule(n, settings.angular_resolution);
  const NodeSet excluded = detail::puncture_set(options.puncture, stencil);

  WeightSet out;
  out.stencil = stencil;
  std::copy(alpha.begin(), alpha.end(), out.alpha.begin());
  out.gamma = kernel.gamma;
  out.kernel_id = kernel.id;
  out.condition_number = moments.condition_number;
  out.L = settings.L;
  out.h0 = settings.h0;
  out.cutoff = options.cutoff;
  out.angular_resolution = settings.angular_resolution;
  out.glue_points = options.glue_points;
  out.puncture = options.puncture;
  out.extrapolation = options.extrapolation;

  const auto size = static_cast<Eigen::Index>(stencil.size());
  std::vector<Vector> estimates;
  double gap = std::numeric_limits<double>::infinity();
  for (const double h : settings.ladder) {
    const GridContext grid = GridContext::centered(n, h, alpha, settings.h0, settings.L, kernel.validity_radius);
    grid.validate_stencil_radius(stencil.max_norm());
    const auto R = detail::R_vector(kernel, indices, grid, options.cutoff, excluded, angular, options.glue_points,
                                    options.workers);
    Vector V(size);
    for (Eigen::Index j = 0; j < size; ++j) V(j) = R[static_cast<std::size_t>(j)];
    const Vector omega = lu.solve(V);

    LadderLevel level;
    level.h = h;
    const long double residual = (moments.K * omega - V).cwiseAbs().maxCoeff();
    const long double scale = std::max<long double>(V.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    level.residual_norm = static_cast<double>(residual / scale);
    for (Eigen::Index i = 0; i < size; ++i) {
      level.omega.push_back(static_cast<double>(omega(i)));
      level.rhs.push_back(static_cast<double>(V(i)));
    }
    out.ladder.push_back(level);

    // Estimate of the limit from the levels seen so far.
    if (options.extrapolation == Extrapolation::richardson && out.ladder.size() >= 2) {
      const auto& prev = out.ladder[out.ladder.size() - 2];
      const long double ratio = static_cast<long double>(prev.h) / h;
      Vector coarse(size);
      for (Eigen::Index i = 0; i < size; ++i) coarse(i) = prev.omega[static_cast<std::size_t>(i)];
      estimates.push_back((ratio * omega - coarse) / (ratio - 1));
    } else if (options.extrapolation == Extrapolation::none) {
      estimates.push_back(omega);
    }
    if (estimates.size() >= 2) {
      gap = static_cast<double>((estimates.back() - estimates[estimates.size() - 2]).cwiseAbs().maxCoeff());
      if (gap < options.tol) {
        out.converged = true;
        break;
      }
    }
  }

  out.residual_norm = out.ladder.back().residual_norm;
  out.stability = gap;
  if (estimates.empty()) {
    out.omega = out.ladder.back().omega;
  } else {
    for (Eigen::Index i = 0; i < size; ++i) out.omega.push_back(static_cast<double>(estimates.back()(i)));
  }
  if (!out.converged)
    throw NoConvergence("weight ladder did not converge: last gap " + format_number(gap) + " >= tol " +
                            format_number(options.tol),
                        out.omega.front(), gap);
  return out;
}

// ---------------------------------------------------------------------------
// Tables over alpha
// ---------------------------------------------------------------------------

/// Weights on the uniform alpha grid {-1/2 + i / resolution}^n, i = 0..resolution.
/// Entries are stored with the first axis varying slowest.
struct WeightTable {
  int n = 1;
  int p = 0;
  double gamma = 0;
  std::string kernel_id;
  int resolution = 2;
  std::vector<Point> alphas;
  std::vector<std::optional<WeightSet>> entries;
  std::vector<std::string> failures;  ///< empty string for successful entries

  std::size_t nodes_per_axis() const noexcept { return static_cast<std::size_t>(resolution) + 1; }

  std::size_t flat_index(std::span<const std::size_t> axis_index) const {
    std::size_t flat = 0;
    for (int d = 0; d < n; ++d) flat = flat * nodes_per_axis() + axis_index[static_cast<std::size_t>(d)];
    return flat;
  }
};

inline double table_node(int resolution, std::size_t i) { return -0.5 + static_cast<double>(i) / resolution; }

/// Solves weights at every alpha of the table grid. Per-entry failures are
/// recorded, not thrown.
inline WeightTable tabulate_weights(const SingularKernel& kernel, int p, int resolution, const WeightOptions& options = {},
                                    std::optional<Stencil> stencil = std::nullopt) {
  require(resolution >= 2, ErrorKind::invalid_parameters, "table resolution must be >= 2");
  const Stencil D = stencil ? *stencil : default_stencil(p, kernel.n);
  WeightTable table;
  table.n = kernel.n;
  table.p = p;
  table.gamma = kernel.gamma;
  table.kernel_id = kernel.id;
  table.resolution = resolution;
  const std::size_t per_axis = table.nodes_per_axis();
  std::size_t total = 1;
  for (int d = 0; d < kernel.n; ++d) total *= per_axis;
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point alpha{};
    std::size_t rest = flat;
    for (int d = kernel.n - 1; d >= 0; --d) {
      alpha[static_cast<std::size_t>(d)] = table_node(resolution, rest % per_axis);
      rest /= per_axis;
    }
    table.alphas.push_back(alpha);
    try {
      table.entries.push_back(solve_weights(kernel, D, std::span<const double>(alpha.data(), static_cast<std::size_t>(kernel.n)), options));
      table.failures.emplace_back();
    } catch (const Error& e) {
      table.entries.emplace_back(std::nullopt);
      table.failures.emplace_back(e.what());
    }
  }
  return table;
}

/// Tensor-product cubic (4-node Lagrange) interpolation of each weight
/// component in alpha. Tables with three nodes per axis fall back to quadratic.
inline WeightSet interpolate_weights(const WeightTable& table, std::span<const double> alpha) {
  require(alpha.size() == static_cast<std::size_t>(table.n), ErrorKind::invalid_parameters, "alpha dimension mismatch");
  for (double a : alpha)
    if (!(std::abs(a) <= 0.5)) throw Error(ErrorKind::out_of_range, "alpha outside [-1/2, 1/2]^n");

  const std::size_t per_axis = table.nodes_per_axis();
  const std::size_t width = std::min<std::size_t>(4, per_axis);
  std::array<std::size_t, kMaxDimension> start{};
  std::array<std::array<double, 4>, kMaxDimension> basis{};
  bool near_tie = false;
  for (int d = 0; d < table.n; ++d) {
    double t = (alpha[static_cast<std::size_t>(d)] + 0.5) * table.resolution;
    const double nearest = std::round(t);
    if (std::abs(t - nearest) < 1e-12) t = nearest;
    long s = static_cast<long>(std::floor(t)) - static_cast<long>(width / 2 - 1 + width % 2);
    s = std::clamp<long>(s, 0, static_cast<long>(per_axis - width));
    start[static_cast<std::size_t>(d)] = static_cast<std::size_t>(s);
    for (std::size_t a = 0; a < width; ++a) {
      double value = 1;
      for (std::size_t b = 0; b < width; ++b)
        if (b != a) value *= (t - static_cast<double>(s + static_cast<long>(b))) / (static_cast<double>(a) - static_cast<double>(b));
      basis[static_cast<std::size_t>(d)][a] = value;
    }
    near_tie = near_tie || t < 1 || t > table.resolution - 1;
  }

  std::optional<WeightSet> out;
  std::size_t combos = 1;
  for (int d = 0; d < table.n; ++d) combos *= width;
  std::vector<double> omega;
  double residual = 0;
  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::array<std::size_t, kMaxDimension> idx{};
    double coefficient = 1;
    std::size_t rest = combo;
    for (int d = table.n - 1; d >= 0; --d) {
      const std::size_t a = rest % width;
      rest /= width;
      idx[static_cast<std::size_t>(d)] = start[static_cast<std::size_t>(d)] + a;
      coefficient *= basis[static_cast<std::size_t>(d)][a];
    }
    const std::size_t flat = table.flat_index(std::span<const std::size_t>(idx.data(), static_cast<std::size_t>(table.n)));
    const auto& entry = table.entries[flat];
    if (!entry) throw Error(ErrorKind::no_convergence, "interpolation needs failed table entry: " + table.failures[flat]);
    if (!out) {
      out = *entry;
      omega.assign(entry->omega.size(), 0.0);
    }
    for (std::size_t i = 0; i < omega.size(); ++i) omega[i] += coefficient * entry->omega[i];
    residual = std::max(residual, entry->residual_norm);
  }

  WeightSet result = *out;
  result.omega = std::move(omega);
  std::copy(alpha.begin(), alpha.end(), result.alpha.begin());
  result.ladder.clear();
  result.interpolated = true;
  result.near_tie = near_tie;
  result.residual_norm = residual;
  result.condition_number = assemble_K(result.stencil, alpha, enumerate_multi_indices(result.stencil.p, result.stencil.n)).condition_number;
  return result;
}

}  // namespace singquad
