#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mincap/error.hpp"
#include "mincap/expression.hpp"
#include "mincap/warped_manifold.hpp"
#include "oracles.hpp"

using namespace mincap;

namespace {
constexpr double kPi = std::numbers::pi;

WarpedManifold flat(int n) { return WarpedManifold(n, make_builtin_warp("flat", {})); }
}  // namespace

TEST(UnitBallVolume, LowDimensions) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4 * kPi / 3, 1e-14);
  EXPECT_NEAR(unit_ball_volume(4), kPi * kPi / 2, 1e-14);
  EXPECT_NEAR(unit_ball_volume(5), 8 * kPi * kPi / 15, 1e-14);
}

TEST(WarpedManifold, SphereAreaOfFlatSpace) {
  const auto m3 = flat(3);
  EXPECT_NEAR(m3.unit_sphere_area(), 4 * kPi, 1e-14);
  EXPECT_NEAR(m3.sphere_area(2.0), 16 * kPi, 1e-13);
  EXPECT_NEAR(flat(2).sphere_area(3.0), 6 * kPi, 1e-13);
}

TEST(WarpedManifold, BallVolumeMatchesFlatFormula) {
  EXPECT_NEAR(flat(2).ball_volume(3.0), 9 * kPi, 1e-10);
  EXPECT_NEAR(flat(3).ball_volume(3.0), 36 * kPi, 1e-9);
  EXPECT_NEAR(flat(4).ball_volume(2.0), kPi * kPi / 2 * 16, 1e-9);
}

TEST(WarpedManifold, BallVolumeOnHyperbolicPlane) {
  const WarpedManifold h(2, make_builtin_warp("hyperbolic", {}));
  EXPECT_NEAR(h.ball_volume(1.5), 2 * kPi * (std::cosh(1.5) - 1), 1e-9);
}

TEST(WarpedManifold, IntegratePowerAgainstSimpson) {
  const WarpedManifold m(3, make_expression_warp("r*(2+sin(r))"));
  const double v = m.integrate_power(-1.5, 0.5, 7.0);
  const auto ref = oracle::simpson(
      [](long double r) { return std::pow(r * (2 + std::sin(r)), -1.5L); }, 0.5L, 7.0L, 1e-15L);
  EXPECT_NEAR(v, static_cast<double>(ref), 1e-11 * std::abs(v));
}

TEST(WarpedManifold, ImproperIntegralVerdicts) {
  const auto m3 = flat(3);
  const auto conv = m3.improper_integral(-2, 1.0);
  EXPECT_EQ(conv.verdict, Verdict::Convergent);
  EXPECT_NEAR(conv.value, 1.0, 1e-7);
  const auto div = flat(2).improper_integral(-1, 1.0);
  EXPECT_EQ(div.verdict, Verdict::Divergent);
}

TEST(WarpedManifold, CompletenessOfFlatSpace) {
  EXPECT_EQ(flat(2).completeness_test().verdict, Verdict::Divergent);
}

TEST(WarpedManifold, WeightInfimumFindsInteriorMinimum) {
  const WarpedManifold m(3, make_expression_warp("1+(r-2.3)^2"), 2, Closure::OpenInner, 0.0);
  const auto mn = m.weight_infimum(0.5, 5.0);
  EXPECT_NEAR(mn.value, 1.0, 1e-12);
  EXPECT_NEAR(mn.location, 2.3, 1e-5);
}

TEST(WarpedManifold, WeightInfimumSeesNecks) {
  const WarpedManifold m(2, make_builtin_warp("neck_cylinder", {{"spacing", 5.0}, {"width", 0.01}, {"ratio", 0.5}}));
  const auto mn = m.weight_infimum(1.0, 12.0);
  EXPECT_NEAR(mn.value, 0.25, 1e-12);
  EXPECT_NEAR(mn.location, 10.0, 1e-9);
}

TEST(WarpedManifold, BreakpointsAreSortedAndBracketed) {
  const WarpedManifold m(2, make_builtin_warp("prop2_6", {{"n", 2}}));
  const auto b = m.breakpoints(1.0, 10.0);
  ASSERT_EQ(b.size(), 5u);
  EXPECT_EQ(b.front(), 1.0);
  EXPECT_EQ(b.back(), 10.0);
  EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
}

TEST(WarpedManifold, RejectsBadConstruction) {
  EXPECT_THROW(WarpedManifold(1, make_builtin_warp("flat", {})), InputError);
  EXPECT_THROW(WarpedManifold(3, make_builtin_warp("flat", {}), 0, Closure::SmoothPole, 0.0), InputError);
  EXPECT_THROW(WarpedManifold(3, make_builtin_warp("flat", {}), 2, Closure::SmoothPole, 1.0), InputError);
  EXPECT_THROW(flat(2).warp(-1.0), InputError);
  EXPECT_THROW(make_builtin_warp("torus", {}), InputError);
  EXPECT_THROW(make_builtin_warp("power", {{"alpha", -1.0}}), InputError);
}

TEST(WarpedManifold, NonPositiveWarpIsRejected) {
  const WarpedManifold m(2, make_expression_warp("r-1"), 1, Closure::OpenInner, 0.0);
  EXPECT_THROW(m.warp(0.5), InputError);
}

TEST(WarpedManifold, JsonRoundTrip) {
  const WarpedManifold m(3, make_expression_warp("r*exp(-r/10)"), 3, Closure::SmoothPole, 0.0);
  const auto back = WarpedManifold::from_json(m.to_json());
  EXPECT_EQ(back.dimension(), 3);
  EXPECT_EQ(back.kappa(), 3);
  EXPECT_EQ(back.closure(), Closure::SmoothPole);
  for (double r : {0.1, 1.0, 7.5}) EXPECT_EQ(back.warp(r), m.warp(r));
  EXPECT_EQ(back.to_json(), m.to_json());
}

TEST(WarpedManifold, BuiltinJsonRoundTrip) {
  for (const char* name : {"flat", "cylinder", "hyperbolic", "cylinder_cap"}) {
    const WarpedManifold m(2, make_builtin_warp(name, {}));
    const auto back = WarpedManifold::from_json(m.to_json());
    EXPECT_EQ(back.to_json(), m.to_json()) << name;
    EXPECT_EQ(back.warp(2.5), m.warp(2.5)) << name;
  }
}

TEST(WarpedManifold, MalformedJsonIsInputError) {
  EXPECT_THROW(WarpedManifold::from_json({{"n", 2}}), InputError);
  EXPECT_THROW(warp_from_json({{"kind", "spline"}}), InputError);
}

TEST(TableWarp, LinearInterpolation) {
  const auto w = make_table_warp({1, 2, 4}, {1, 3, 2}, Interpolation::Linear);
  EXPECT_DOUBLE_EQ(w->value(1.5), 2.0);
  EXPECT_DOUBLE_EQ(w->value(3.0), 2.5);
  EXPECT_THROW(w->value(5.0), InputError);
  EXPECT_THROW(make_table_warp({1, 1}, {1, 2}, Interpolation::Linear), InputError);
  EXPECT_THROW(make_table_warp({1, 2}, {1, -2}, Interpolation::Linear), InputError);
}

TEST(TableWarp, MonotoneCubicStaysWithinData) {
  const auto w = make_table_warp({0, 1, 2, 3}, {1, 1.5, 4, 4.2}, Interpolation::MonotoneCubic);
  double prev = w->value(0);
  for (double r = 0.01; r <= 3.0; r += 0.01) {
    const double v = w->value(r);
    EXPECT_GE(v, prev - 1e-15);
    EXPECT_LE(v, 4.2 + 1e-15);
    prev = v;
  }
  EXPECT_DOUBLE_EQ(w->value(2.0), 4.0);
}

TEST(Expression, ArithmeticAndCalls) {
  EXPECT_NEAR(static_cast<double>(Expression::parse("2*r^2 - 3/r").evaluate(2)), 6.5, 1e-15);
  EXPECT_NEAR(static_cast<double>(Expression::parse("pow(r,0.5)+exp(0)*cos(pi)").evaluate(9)), 2.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(Expression::parse("-min(r,1)+max(abs(-r),log(1))").evaluate(3)), 2.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(Expression::parse("sin(pi/6)").evaluate(0)), 0.5, 1e-15);
}

TEST(Expression, SyntaxErrors) {
  EXPECT_THROW(Expression::parse("r+"), InputError);
  EXPECT_THROW(Expression::parse("foo(r)"), InputError);
  EXPECT_THROW(Expression::parse("(r"), InputError);
  EXPECT_THROW(Expression::parse("x"), InputError);
}

TEST(LogGrid, EndpointsAndRatio) {
  const auto g = log_grid(1.0, 1000.0, 10);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_EQ(g.back(), 1000.0);
  EXPECT_GE(g.size(), 31u);
  for (std::size_t i = 2; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-9);
}
