#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace singquad;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::usage;
}

std::span<const double> span_of(const Point& p, int n) { return {p.data(), static_cast<std::size_t>(n)}; }

}  // namespace

TEST(Stencil, DefaultExamples) {
  const auto s = default_stencil(1, 2);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.points[0], (IntPoint{0, 0, 0}));
  EXPECT_EQ(s.points[1], (IntPoint{0, 1, 0}));
  EXPECT_EQ(s.points[2], (IntPoint{1, 0, 0}));
  EXPECT_EQ(default_stencil(2, 3).size(), 10u);
  EXPECT_EQ(default_stencil(0, 1).points.front(), IntPoint{});
}

TEST(Stencil, ValidationErrors) {
  EXPECT_EQ(kind_of([] { make_stencil(2, 1, {IntPoint{0, 0, 0}, IntPoint{1, 0, 0}}); }), ErrorKind::invalid_parameters);
  EXPECT_EQ(kind_of([] { make_stencil(1, 1, {IntPoint{1, 0, 0}, IntPoint{2, 0, 0}}); }), ErrorKind::invalid_parameters);
  EXPECT_EQ(kind_of([] { make_stencil(1, 1, {IntPoint{0, 0, 0}, IntPoint{0, 0, 0}}); }), ErrorKind::invalid_parameters);
}

TEST(MomentMatrix, Examples) {
  const double zero[1] = {0.0};
  const auto k1 = assemble_K(default_stencil(1, 1), zero, enumerate_multi_indices(1, 1));
  EXPECT_EQ(k1.K(0, 0), 1.0L);
  EXPECT_EQ(k1.K(0, 1), 1.0L);
  EXPECT_EQ(k1.K(1, 0), 0.0L);
  EXPECT_EQ(k1.K(1, 1), 1.0L);

  const double alpha[2] = {0.25, -0.5};
  const auto k2 = assemble_K(default_stencil(1, 2), alpha, enumerate_multi_indices(1, 2));
  // Rows 1, x2, x1; columns (0,0), (0,1), (1,0).
  EXPECT_EQ(k2.K(1, 0), 0.5L);
  EXPECT_EQ(k2.K(1, 1), 1.5L);
  EXPECT_EQ(k2.K(2, 0), -0.25L);
  EXPECT_EQ(k2.K(2, 2), 0.75L);
  EXPECT_TRUE(std::isfinite(k2.condition_number));
}

TEST(MomentMatrix, CollinearStencilIsDegenerate) {
  const auto k = sqtest::const_kernel(2, -1.0);
  const auto s = make_stencil(2, 1, {IntPoint{0, 0, 0}, IntPoint{1, 0, 0}, IntPoint{2, 0, 0}});
  const double alpha[2] = {0.1, 0.2};
  EXPECT_EQ(kind_of([&] { solve_weights(k, s, alpha); }), ErrorKind::stencil_degenerate);
  EXPECT_FALSE(assemble_K(s, alpha, enumerate_multi_indices(1, 2)).condition_number <= kConditionThreshold);
}

TEST(Ladder, Defaults) {
  const auto a = default_ladder(2);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a.front(), 1.0 / 16);
  EXPECT_EQ(a.back(), 1.0 / 256);
  const auto b = default_ladder(3);
  ASSERT_EQ(b.size(), 4u);
  EXPECT_EQ(b.front(), 1.0 / 8);
  EXPECT_EQ(default_ladder(1, 2).size(), 2u);
}

TEST(Ladder, RejectsNonDecreasing) {
  WeightOptions o;
  o.ladder = {0.1, 0.1};
  const double zero[1] = {0.0};
  EXPECT_EQ(kind_of([&] { solve_weights(sqtest::const_kernel(1, -0.5), default_stencil(0, 1), zero, o); }),
            ErrorKind::invalid_parameters);
}

TEST(RBeta, PlainTrapezoidGivesUnitR0) {
  // gamma = 0, constant kernel: the only missing lattice term is h * 1.
  const double zero[1] = {0.0};
  const auto g = GridContext::centered(1, 1.0 / 16, zero, 0.125, 2.0);
  EXPECT_NEAR(compute_R_beta(sqtest::const_kernel(1, 0.0), MultiIndex{0}, g, make_standard_cutoff()), 1.0, 1e-12);
}

TEST(RBeta, OddAngularVanishesAtOrigin) {
  const auto k = make_kernel(2, -1.0, [](std::span<const double> u) { return u[0]; }, "odd");
  const double zero[2] = {0.0, 0.0};
  const auto g = GridContext::centered(2, 1.0 / 16, zero, 0.125, 2.0);
  EXPECT_NEAR(compute_R_beta(k, MultiIndex{0, 0}, g, make_standard_cutoff()), 0.0, 1e-10);
}

TEST(SolveWeights, UnitWeightForSmoothConstant) {
  for (double a : {0.0, 0.3}) {
    const double alpha[1] = {a};
    const auto w = solve_weights(sqtest::const_kernel(1, 0.0), default_stencil(0, 1), alpha);
    ASSERT_EQ(w.omega.size(), 1u);
    EXPECT_NEAR(w.omega[0], 1.0, 1e-6);
    EXPECT_TRUE(w.converged);
  }
}

TEST(SolveWeights, OneDimensionalInverseSqrt) {
  // -2 zeta(1/2).
  const double zero[1] = {0.0};
  const auto w = solve_weights(sqtest::const_kernel(1, -0.5), default_stencil(0, 1), zero);
  EXPECT_NEAR(w.omega[0], 2.9207090176191524, 1e-9);
}

TEST(SolveWeights, OrderZeroWeightIsR0) {
  const double alpha[2] = {0.2, -0.1};
  const auto w = solve_weights(sqtest::const_kernel(2, -1.0), default_stencil(0, 2), alpha);
  for (const auto& level : w.ladder) {
    ASSERT_EQ(level.omega.size(), 1u);
    EXPECT_EQ(level.omega[0], level.rhs[0]);
  }
}

TEST(SolveWeights, ResidualAndRecord) {
  const double alpha[2] = {0.3, -0.2};
  const auto k = sqtest::const_kernel(2, -1.0);
  const auto w = solve_weights(k, default_stencil(1, 2), alpha);
  EXPECT_LT(w.residual_norm, 1e-12);
  EXPECT_LE(w.stability, WeightOptions{}.tol);
  EXPECT_EQ(w.omega.size(), 3u);
  EXPECT_EQ(w.kernel_id, "const");
  EXPECT_EQ(w.gamma, -1.0);
  EXPECT_EQ(w.L, 2.0);
  EXPECT_EQ(w.h0, 0.125);
  EXPECT_FALSE(w.interpolated);
  EXPECT_THROW(w.at_level(w.ladder.size()), Error);
}

TEST(SolveWeights, NoConvergenceCarriesBestEstimate) {
  WeightOptions o;
  o.ladder = {1.0 / 4, 1.0 / 8};
  o.tol = 1e-15;
  const double alpha[2] = {0.3, -0.2};
  try {
    solve_weights(sqtest::const_kernel(2, -1.0), default_stencil(1, 2), alpha, o);
    FAIL();
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_convergence);
    EXPECT_TRUE(std::isfinite(e.best_estimate()));
    EXPECT_GT(e.gap(), 1e-15);
  }
}

TEST(SolveWeights, RejectsRadialKernel) {
  const auto k = make_expanded_kernel(2, -1.0, [](double r, std::span<const double>) { return std::exp(r); },
                                      {[](std::span<const double>) { return 1.0; }});
  const double alpha[2] = {0, 0};
  EXPECT_EQ(kind_of([&] { solve_weights(k, default_stencil(0, 2), alpha); }), ErrorKind::invalid_parameters);
}

// The level-h weights reproduce the exact moments of the shifted windowed
// monomials they were built from.
TEST(SolveWeights, LevelWeightsAreExactOnMoments) {
  const double alpha[2] = {0.3, -0.2};
  const auto k = sqtest::const_kernel(2, -1.0);
  const auto w = solve_weights(k, default_stencil(1, 2), alpha);
  const auto c = make_standard_cutoff();
  for (std::size_t j = 0; j < w.ladder.size(); ++j) {
    const double h = w.ladder[j].h;
    const auto g = GridContext::centered(2, h, alpha, w.h0, w.L);
    const Point x0 = g.singular_point();
    for (const auto& nu : enumerate_multi_indices(1, 2)) {
      const SmoothFactor v{[&, nu](std::span<const double> x) {
                             const double y[2] = {x[0] - x0[0], x[1] - x0[1]};
                             return nu.monomial(std::span<const double>(y, 2)) * eval_window(c, w.L, y);
                           },
                           w.L + norm(span_of(x0, 2)), "moment"};
      const double exact = moment_integral(k, nu, c, w.L, angular_rule(2, w.angular_resolution));
      const double rule = corrected_rule(k, v, g, w.at_level(j));
      EXPECT_LE(std::abs(rule - exact), 1e-10 * std::max(1.0, std::abs(exact))) << "level " << j;
    }
  }
}

TEST(WeightTable, LayoutAndBitwiseEntry) {
  const auto k = sqtest::const_kernel(1, -0.5);
  const auto t = tabulate_weights(k, 1, 4);
  ASSERT_EQ(t.entries.size(), 5u);
  EXPECT_EQ(t.alphas[0][0], -0.5);
  EXPECT_EQ(t.alphas[2][0], 0.0);
  const double zero[1] = {0.0};
  const auto direct = solve_weights(k, default_stencil(1, 1), zero);
  ASSERT_TRUE(t.entries[2].has_value());
  EXPECT_EQ(t.entries[2]->omega, direct.omega);
}

TEST(WeightTable, InterpolationAtNodesAndRange) {
  const auto k = sqtest::const_kernel(1, -0.5);
  const auto t = tabulate_weights(k, 1, 4);
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto w = interpolate_weights(t, span_of(t.alphas[i], 1));
    for (std::size_t c = 0; c < w.omega.size(); ++c) EXPECT_NEAR(w.omega[c], t.entries[i]->omega[c], 1e-14);
    EXPECT_TRUE(w.interpolated);
  }
  const double outside[1] = {0.6};
  EXPECT_EQ(kind_of([&] { interpolate_weights(t, outside); }), ErrorKind::out_of_range);
  const double edge[1] = {0.45};
  EXPECT_TRUE(interpolate_weights(t, edge).near_tie);
  const double inside[1] = {0.1};
  EXPECT_FALSE(interpolate_weights(t, inside).near_tie);
}

// Cubic interpolation at resolution 8 is good to about 2e-3 for this kernel:
// the weights are smooth in alpha but their fourth derivatives are large
// once a neighbouring lattice point comes within ~0.6 of the singularity.
TEST(WeightTable, PlaneInterpolationAccuracy) {
  const auto k = sqtest::const_kernel(2, -1.0);
  const auto t = tabulate_weights(k, 1, 8);
  for (const auto& f : t.failures) EXPECT_TRUE(f.empty()) << f;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  for (int trial = 0; trial < 3; ++trial) {
    const double alpha[2] = {coord(rng), coord(rng)};
    const auto direct = solve_weights(k, default_stencil(1, 2), alpha);
    const auto interp = interpolate_weights(t, alpha);
    for (std::size_t i = 0; i < direct.omega.size(); ++i) EXPECT_NEAR(interp.omega[i], direct.omega[i], 2e-3);
  }
}

TEST(WeightIO, RecordRoundTrip) {
  const double alpha[2] = {0.3, -0.2};
  auto w = solve_weights(sqtest::const_kernel(2, -1.0), default_stencil(1, 2), alpha);
  w.kernel_params = {{"k", 2.0}};
  const auto path = std::filesystem::temp_directory_path() / "singquad_record_roundtrip.json";
  write_json(path.string(), to_json(w));
  const auto back = weight_set_from_json(read_json(path.string()));
  std::filesystem::remove(path);
  EXPECT_EQ(back.omega, w.omega);
  EXPECT_EQ(back.stencil.points, w.stencil.points);
  EXPECT_EQ(back.alpha, w.alpha);
  EXPECT_EQ(back.gamma, w.gamma);
  EXPECT_EQ(back.kernel_id, w.kernel_id);
  EXPECT_EQ(back.kernel_params, w.kernel_params);
  EXPECT_EQ(back.ladder.size(), w.ladder.size());
  EXPECT_EQ(back.ladder.back().omega, w.ladder.back().omega);
  EXPECT_EQ(back.L, w.L);
  EXPECT_EQ(back.puncture, w.puncture);
}

TEST(WeightIO, TableRoundTrip) {
  const auto t = tabulate_weights(sqtest::const_kernel(1, -0.5), 0, 2);
  const auto back = weight_table_from_json(to_json(t));
  ASSERT_EQ(back.entries.size(), t.entries.size());
  for (std::size_t i = 0; i < t.entries.size(); ++i) EXPECT_EQ(back.entries[i]->omega, t.entries[i]->omega);
  EXPECT_EQ(back.resolution, 2);
}

TEST(WeightIO, RejectsWrongFormat) {
  EXPECT_THROW(weight_set_from_json(nlohmann::json{{"format_version", 99}}), Error);
  EXPECT_THROW(weight_set_from_json(nlohmann::json::array()), Error);
}
