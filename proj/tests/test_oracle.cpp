#include <gtest/gtest.h>

#include "support.hpp"

using namespace singquad;

TEST(EstimateOrder, Examples) {
  const std::pair<double, double> quadratic[] = {{0.1, 1e-2}, {0.05, 2.5e-3}};
  const auto a = estimate_order(quadratic);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(*a[0], 2.0, 1e-12);

  const std::pair<double, double> flat[] = {{0.1, 3e-4}, {0.05, 3e-4}};
  EXPECT_NEAR(*estimate_order(flat)[0], 0.0, 1e-12);

  const std::pair<double, double> exact[] = {{0.1, 1e-3}, {0.05, 0.0}, {0.025, 0.0}};
  const auto c = estimate_order(exact);
  EXPECT_FALSE(c[0].has_value());
  EXPECT_FALSE(c[1].has_value());
}

TEST(EstimateOrder, Validation) {
  const std::pair<double, double> one[] = {{0.1, 1.0}};
  EXPECT_THROW(estimate_order(one), Error);
  const std::pair<double, double> increasing[] = {{0.05, 1.0}, {0.1, 0.5}};
  EXPECT_THROW(estimate_order(increasing), Error);
}

TEST(EstimateOrder, MedianOfLastThree) {
  const std::vector<std::optional<double>> orders = {1.0, 5.0, 2.0, std::nullopt, 3.0};
  EXPECT_EQ(*median_of_last(orders), 2.5);
  const std::vector<std::optional<double>> none = {std::nullopt, std::nullopt};
  EXPECT_FALSE(median_of_last(none).has_value());
}

TEST(Oracle, ZeroFactor) {
  const SmoothFactor zero{[](std::span<const double>) { return 0.0; }, 1.0, "zero"};
  const double x0[2] = {0.01, 0.02};
  EXPECT_EQ(reference_integral(sqtest::const_kernel(2, -1.0), zero, x0, 1e-13).value, 0.0);
}

TEST(Oracle, PlaneWindowClosedForm) {
  // int |x|^{-1} psi(|x|) dx = 2 pi int_0^1 psi(r) dr = 2 pi * 0.875.
  const double x0[2] = {0.0, 0.0};
  const auto r = reference_integral(sqtest::const_kernel(2, -1.0), sqtest::window(2, 1.0), x0, 1e-13);
  EXPECT_NEAR(r.value, 2 * std::numbers::pi * 0.875, 1e-12);
}

TEST(Oracle, OneDimensionStableAcrossSchedules) {
  const auto k = sqtest::const_kernel(1, -0.5);
  const auto v = sqtest::window_exp(1, 1.0, {0.8});
  const double x0[1] = {0.013};
  OracleOptions coarse;
  coarse.radial_panels = 30;
  OracleOptions fine;
  fine.radial_panels = 90;
  fine.max_depth = 16;
  const double a = reference_integral(k, v, x0, 1e-13, coarse).value;
  const double b = reference_integral(k, v, x0, 1e-13, fine).value;
  EXPECT_LT(sqtest::relative(a, b), 1e-11);
}

TEST(Oracle, RotationInvariance) {
  const auto k = sqtest::const_kernel(2, -1.0);
  const double t = 0.7;
  const double q[2] = {0.4, -0.3};
  auto make = [&](double angle) {
    const auto c = make_standard_cutoff();
    return SmoothFactor{[c, angle, q](std::span<const double> x) {
                          const double y0 = std::cos(angle) * x[0] + std::sin(angle) * x[1];
                          const double y1 = -std::sin(angle) * x[0] + std::cos(angle) * x[1];
                          return std::exp(q[0] * y0 + q[1] * y1) * eval_window(c, 1.0, x);
                        },
                        1.0, "rotated"};
  };
  const double x0[2] = {0.0, 0.0};
  const double a = reference_integral(k, make(0.0), x0, 1e-12).value;
  const double b = reference_integral(k, make(t), x0, 1e-12).value;
  EXPECT_LT(sqtest::relative(a, b), 1e-9);
}

TEST(Oracle, TighterToleranceMovesLess) {
  const auto k = sqtest::const_kernel(2, -0.5);
  const auto v = sqtest::window_exp(2, 1.0, {0.5, 0.2});
  const double x0[2] = {0.02, -0.01};
  const auto loose = reference_integral(k, v, x0, 1e-8);
  const auto tight = reference_integral(k, v, x0, 1e-12);
  EXPECT_LE(tight.achieved_tolerance, 1e-12);
  EXPECT_LT(std::abs(loose.value - tight.value), 1e-7);
  EXPECT_GE(tight.angular_resolution, loose.angular_resolution);
}

TEST(Oracle, ThreeDimensionsBall) {
  // int_{B} |x|^{-2} psi dx = 4 pi int_0^1 psi(r) dr.
  const double x0[3] = {0, 0, 0};
  const auto r = reference_integral(sqtest::const_kernel(3, -2.0), sqtest::window(3, 1.0), x0, 1e-11);
  EXPECT_NEAR(r.value, 4 * std::numbers::pi * 0.875, 1e-10);
}

TEST(Oracle, RejectsBadTolerance) {
  const double x0[1] = {0.0};
  EXPECT_THROW(reference_integral(sqtest::const_kernel(1, -0.5), sqtest::window(1, 1.0), x0, 0.0), Error);
}
