#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mincap/error.hpp"
#include "mincap/radial_solver.hpp"
#include "oracles.hpp"

using namespace mincap;

namespace {
constexpr double kPi = std::numbers::pi;

WarpedManifold flat(int n) { return WarpedManifold(n, make_builtin_warp("flat", {})); }
WarpedManifold exp_warp(double lambda, int n = 2) {
  return WarpedManifold(n, make_builtin_warp("exp", {{"lambda", lambda}, {"n", n}}));
}
}  // namespace

TEST(MinimalSlope, FlatPlaneIsCatenoidSlope) {
  const auto m = flat(2);
  EXPECT_NEAR(minimal_slope(m, 2.0, 1.0), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(minimal_slope(m, 2.0, 0.0), 0.0);
  EXPECT_THROW(minimal_slope(m, 2.0, 2.0), SingularInputError);
}

TEST(IntegrateDrop, CatenoidClosedForm) {
  const auto m = flat(2);
  for (double q : {0.1, 0.5, 0.9, 1.0}) {
    const double d = integrate_drop(m, 1.0, 5.0, q);
    EXPECT_NEAR(d, static_cast<double>(oracle::catenoid::drop(q, 1, 5)), 1e-10) << q;
  }
}

TEST(IntegrateDrop, ThreeDimensionalSimpsonOracle) {
  const auto m = flat(3);
  const double q = 0.7;
  const double d = integrate_drop(m, 1.0, 4.0, q);
  const auto ref = oracle::simpson([q](long double r) { return q / std::sqrt(r * r * r * r - q * q); }, 1, 4);
  EXPECT_NEAR(d, static_cast<double>(ref), 1e-11);
}

TEST(IntegrateDrop, UnboundedAnnulus) {
  // flat R^3, q = 1: drop over [1, inf) of 1 / sqrt(r^4 - 1) = K(1/sqrt 2) / sqrt 2
  const double d = integrate_drop(flat(3), 1.0, INFINITY, 1.0);
  EXPECT_NEAR(d, std::comp_ellint_1(1 / std::sqrt(2.0)) / std::sqrt(2.0), 1e-8);
}

TEST(InteriorArea, CatenoidClosedForm) {
  const double q = 0.6;
  EXPECT_NEAR(interior_area(flat(2), 1.0, 3.0, q), static_cast<double>(oracle::catenoid::area(q, 1, 3)), 1e-10);
}

TEST(ExponentialDrop, MatchesQuadrature) {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto m = exp_warp(lambda);
    const double T = 1.7;
    const double numeric = integrate_drop(m, 0.0, 1.0, std::exp(-lambda * T));
    EXPECT_NEAR(exponential_drop(lambda, 0, 1, T), static_cast<double>(oracle::exponential_drop(lambda, 0, 1, T)),
                1e-14);
    EXPECT_NEAR(numeric, exponential_drop(lambda, 0, 1, T), 1e-9) << lambda;
  }
}

TEST(OscillationSup, BoundAndSaturation) {
  EXPECT_LE(oscillation_sup(1.0, 0, 1, 50), kPi / 2);
  EXPECT_NEAR(oscillation_sup(1.0, 0, 40, 50), kPi / 2, 1e-6);
  EXPECT_EQ(oscillation_sup(1.0, 2, 2, 50), 0.0);
}

TEST(OscillationSup, AgreesWithIndependentSweep) {
  const double lambda = 1.0;
  long double best = 0;
  for (int i = 0; i <= 200000; ++i) {
    const long double T = 1 + 50.0L * i / 200000;
    best = std::max(best, oracle::exponential_drop(lambda, 0, 1, T));
  }
  EXPECT_NEAR(oscillation_sup(lambda, 0, 1, 50), static_cast<double>(best), 1e-8);
}

TEST(ShootForDrop, AttachedCatenoid) {
  const auto m = flat(2);
  const double t = 0.5;
  const auto p = shoot_for_drop(m, 1.0, 5.0, t);
  EXPECT_TRUE(p.attached);
  EXPECT_NEAR(p.drop + p.jump_inner + p.jump_outer, t, 1e-12);
  EXPECT_EQ(p.jump_inner, 0.0);
  EXPECT_EQ(p.jump_outer, 0.0);
  const double q = static_cast<double>(oracle::catenoid::flux_for_drop(t, 1, 5));
  EXPECT_NEAR(p.flux_q, q, 1e-11);
}

TEST(ShootForDrop, FirstIntegralHoldsOnGrid) {
  const WarpedManifold m(3, make_expression_warp("r*(1.5+sin(r))"));
  const auto p = shoot_for_drop(m, 0.5, 6.0, 0.8);
  ASSERT_EQ(p.grid.size(), p.slopes.size());
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double W = m.weight(p.grid[i]);
    const double s = std::abs(p.slopes[i]);
    if (!std::isfinite(s)) continue;
    EXPECT_NEAR(W * s / std::sqrt(1 + s * s), p.flux_q, 1e-10 * std::max(1.0, p.flux_q));
  }
}

TEST(ShootForDrop, ProfileIsMonotoneAndHitsBoundaryValues) {
  const auto m = flat(3);
  const double t = 0.4;
  const auto p = shoot_for_drop(m, 1.0, 3.0, t);
  EXPECT_NEAR(p.values.front(), t - p.jump_inner, 1e-12);
  EXPECT_NEAR(p.values.back(), p.jump_outer, 1e-10);
  for (std::size_t i = 1; i < p.values.size(); ++i) EXPECT_LE(p.values[i], p.values[i - 1] + 1e-15);
  EXPECT_NEAR(profile_value(m, p, 1.0), t, 1e-12);
  EXPECT_NEAR(profile_value(m, p, 3.0), 0.0, 1e-10);
}

TEST(ShootForDrop, DetachesWhenDropIsUnreachable) {
  // the exponential weight caps the interior drop, so a large gap must jump
  const auto m = exp_warp(1.0);
  const double t = 3.0;
  const auto p = shoot_for_drop(m, 0.0, 3.0, t);
  EXPECT_FALSE(p.attached);
  EXPECT_NEAR(p.drop + p.jump_inner + p.jump_outer, t, 1e-10);
  EXPECT_LE(p.drop, kPi / 2 + 1e-9);
  // the cheaper wall sits on the smaller sphere
  EXPECT_GT(p.jump_outer, 0.0);
  EXPECT_EQ(p.jump_inner, 0.0);
}

TEST(ShootForDrop, ZeroGap) {
  const auto p = shoot_for_drop(flat(2), 1.0, 2.0, 0.0);
  EXPECT_EQ(p.flux_q, 0.0);
  EXPECT_EQ(p.drop, 0.0);
}

TEST(ShootForDrop, RejectsBadRadii) {
  EXPECT_THROW(shoot_for_drop(flat(2), 2.0, 1.0, 0.5), InputError);
  EXPECT_THROW(shoot_for_drop(flat(2), 1.0, 2.0, -0.5), InputError);
}

TEST(RadialOde, ResidualIsSecondOrderInStep) {
  // u'' / (1 + u'^2) + (W'/W) u' = 0 with u' from the first integral
  const WarpedManifold m(2, make_expression_warp("r*(1.2+cos(r))"));
  const double q = 0.3;
  const double r = 2.0;
  auto up = [&](double x) { return -minimal_slope(m, x, q); };
  auto logW = [&](double x) { return std::log(m.weight(x)); };
  auto residual = [&](double h) {
    const double upp = (up(r + h) - up(r - h)) / (2 * h);
    const double dlogW = (logW(r + h) - logW(r - h)) / (2 * h);
    const double u1 = up(r);
    return std::abs(upp / (1 + u1 * u1) + dlogW * u1);
  };
  const double e1 = residual(1e-2);
  const double e2 = residual(5e-3);
  EXPECT_LT(e2, e1);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(RadialHarmonic, FlatPlaneIsLogarithmic) {
  const auto h = radial_harmonic(flat(2), 1.0, 10.0, 33);
  ASSERT_FALSE(h.grid.empty());
  for (std::size_t i = 0; i < h.grid.size(); ++i)
    EXPECT_NEAR(h.values[i], 1 - std::log(h.grid[i]) / std::log(10.0), 1e-9);
  EXPECT_NEAR(h.c, 1 / std::log(10.0), 1e-10);
}

TEST(RadialHarmonic, ParabolicSignalOnPlaneAtInfinity) {
  const auto h = radial_harmonic(flat(2), 1.0, INFINITY);
  EXPECT_TRUE(h.parabolic_signal);
  EXPECT_EQ(h.c, 0.0);
}

TEST(Barrier, SolvesItsOde) {
  const Barrier b(0.3, 1.5, 2.0);
  for (double s : {0.1, 0.7, 1.9}) {
    const double d1 = b.derivative(s);
    EXPECT_NEAR(1.5 * d1 + b.second_derivative(s) / (1 + d1 * d1), 0.0, 1e-12);
  }
  EXPECT_NEAR(b.derivative(0), 0.3, 1e-14);
  EXPECT_EQ(b.value(0), 0.0);
  EXPECT_GE(b.value(2.0), b.lambda_eps() - 1e-12);
  // value is the integral of the derivative
  const auto ref = oracle::simpson([&](long double s) { return static_cast<long double>(b.derivative(double(s))); }, 0, 1.3);
  EXPECT_NEAR(b.value(1.3), static_cast<double>(ref), 1e-11);
}

TEST(RadialProfile, JsonHasCoreFields) {
  const auto p = shoot_for_drop(flat(2), 1.0, 2.0, 0.1);
  const auto j = to_json(p);
  EXPECT_TRUE(j.contains("flux_q"));
  EXPECT_EQ(j.at("grid_points").get<std::size_t>(), p.grid.size());
  EXPECT_EQ(j.at("attached").get<bool>(), true);
}
