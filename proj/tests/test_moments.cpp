#include <gtest/gtest.h>

#include "support.hpp"

using namespace singquad;

TEST(AngularRule, OneDimension) {
  const auto r = angular_rule(1, 7);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.nodes[0][0], -1.0L);
  EXPECT_EQ(r.nodes[1][0], 1.0L);
  EXPECT_EQ(r.weights[0], 1.0L);
  EXPECT_EQ(r.weights[1], 1.0L);
}

TEST(AngularRule, TotalWeightIsSurfaceArea) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(static_cast<double>(angular_rule(2, 16).total_weight()), 2 * pi, 1e-12 * 2 * pi);
  EXPECT_NEAR(static_cast<double>(angular_rule(3, 12).total_weight()), 4 * pi, 1e-12 * 4 * pi);
  EXPECT_NEAR(static_cast<double>(angular_rule(1, 1).total_weight()), 2.0, 0.0);
}

TEST(AngularRule, SecondMoment) {
  const auto r = angular_rule(2, 32);
  long double s = 0;
  for (std::size_t j = 0; j < r.size(); ++j) s += r.weights[j] * r.nodes[j][0] * r.nodes[j][0];
  EXPECT_NEAR(static_cast<double>(s), std::numbers::pi, 1e-12);
  const auto q = angular_rule(3, 12);
  long double z2 = 0;
  for (std::size_t j = 0; j < q.size(); ++j) z2 += q.weights[j] * q.nodes[j][2] * q.nodes[j][2];
  EXPECT_NEAR(static_cast<double>(z2), 4 * std::numbers::pi / 3, 1e-12);
}

TEST(AngularRule, RejectsUnsupportedDimension) {
  try {
    angular_rule(4, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_parameters);
  }
}

// Reference values from 30-digit adaptive quadrature of the same profile.
TEST(RadialMoment, ReferenceValues) {
  const auto c = make_standard_cutoff();
  EXPECT_NEAR(radial_moment(0.0, c, 1.0), 0.875, 1e-15);
  EXPECT_NEAR(radial_moment(1.0, c, 1.0), 0.38365370969284631931, 1e-15);
  EXPECT_NEAR(radial_moment(-0.5, c, 2.0), 2.6450234901690466285, 1e-14);
}

TEST(RadialMoment, PlateauTerm) {
  // A very thin transition leaves essentially the plateau (aL)^{e+1} / (e+1).
  const auto c = make_standard_cutoff(0.75, 0.75 + 1e-9);
  EXPECT_NEAR(radial_moment(0.0, c, 1.0), 0.75, 1e-8);
  EXPECT_NEAR(radial_moment(1.0, c, 1.0), 0.28125, 1e-8);
}

TEST(RadialMoment, GluePointsConverged) {
  const auto c = make_standard_cutoff();
  for (double e : {-0.5, 0.0, 1.0, 2.5}) {
    const double a = radial_moment(e, c, 2.0, kDefaultGluePoints);
    const double b = radial_moment(e, c, 2.0, 2 * kDefaultGluePoints);
    EXPECT_LT(sqtest::relative(a, b), 1e-13) << e;
  }
}

TEST(RadialMoment, RejectsNonIntegrableExponent) {
  try {
    radial_moment(-1.0, make_standard_cutoff(), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_integrable_moment);
  }
}

TEST(MomentIntegral, OddSymmetryVanishes) {
  const auto c = make_standard_cutoff();
  const auto k2 = sqtest::const_kernel(2, -1.0);
  EXPECT_NEAR(moment_integral(k2, MultiIndex{1, 0}, c, 1.0, angular_rule(2, 64)), 0.0, 1e-15);
  const auto k1 = sqtest::const_kernel(1, -0.5);
  EXPECT_NEAR(moment_integral(k1, MultiIndex{1}, c, 1.0, angular_rule(1, 1)), 0.0, 1e-15);
}

TEST(MomentIntegral, PlaneConstantKernel) {
  const auto c = make_standard_cutoff();
  const auto k = sqtest::const_kernel(2, -1.0);
  EXPECT_NEAR(moment_integral(k, MultiIndex{0, 0}, c, 1.0, angular_rule(2, 64)), 2 * std::numbers::pi * 0.875, 1e-14);
}

TEST(MomentIntegral, AngularResolutionConverged) {
  const auto c = make_standard_cutoff();
  for (int k = 0; k <= 8; ++k) {
    const auto cosk = make_kernel(2, -1.0, [k](std::span<const double> u) { return std::cos(k * std::atan2(u[1], u[0])); });
    const auto sink = make_kernel(2, -1.0, [k](std::span<const double> u) { return std::sin(k * std::atan2(u[1], u[0])); });
    const int res = 4 * k + 8;
    for (const auto& kernel : {cosk, sink})
      for (const auto& beta : enumerate_multi_indices(3, 2)) {
        const double a = moment_integral(kernel, beta, c, 2.0, angular_rule(2, res));
        const double b = moment_integral(kernel, beta, c, 2.0, angular_rule(2, 2 * res));
        EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b))) << k;
      }
  }
}

TEST(MomentIntegral, ParityOfEvenKernels) {
  const auto c = make_standard_cutoff();
  for (int k = 0; k <= 6; k += 2) {
    const auto kernel = make_kernel(2, -0.5, [k](std::span<const double> u) { return std::cos(k * std::atan2(u[1], u[0])); });
    for (const auto& beta : enumerate_multi_indices(4, 2))
      if (beta.order() % 2 == 1)
        EXPECT_NEAR(moment_integral(kernel, beta, c, 1.5, angular_rule(2, 64)), 0.0, 1e-13);
  }
}

// The oracle integrates the same moment in polar coordinates about a shifted
// point with its own quadrature, so no alpha enters either side.
TEST(MomentIntegral, MatchesOracleOnShiftedIntegrand) {
  const auto c = make_standard_cutoff();
  const auto kernel = make_kernel(2, -1.0, [](std::span<const double> u) { return 1 + 0.5 * u[0]; }, "k");
  const double shift[2] = {0.03, -0.02};
  const double L = 2.0;
  for (const auto& beta : enumerate_multi_indices(2, 2)) {
    SmoothFactor v{[&, beta](std::span<const double> x) {
                     const double y[2] = {x[0] - shift[0], x[1] - shift[1]};
                     return beta.monomial(std::span<const double>(y, 2)) * c(norm(y) / L);
                   },
                   L + norm(shift), "shifted"};
    const double oracle = reference_integral(kernel, v, shift, 1e-12).value;
    const double moment = moment_integral(kernel, beta, c, L, angular_rule(2, 64));
    EXPECT_LE(std::abs(oracle - moment), 1e-10 * std::max(1.0, std::abs(moment)));
  }
}
