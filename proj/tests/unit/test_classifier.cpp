#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mincap/classifier.hpp"
#include "mincap/error.hpp"
#include "mincap/examples.hpp"

using namespace mincap;

namespace {
WarpedManifold example(const std::string& id) { return build(parse_example_id(id)); }
}  // namespace

TEST(Classify, FlatPlaneIsParabolic) {
  const auto c = classify(example("flat2"));
  EXPECT_EQ(c.parabolicity, Parabolicity::Parabolic);
  EXPECT_EQ(c.m_parabolicity, MParabolicity::MParabolic);
  ASSERT_NE(c.find("harmonic_normalizer"), nullptr);
  EXPECT_EQ(c.find("harmonic_normalizer")->certificate->verdict, Verdict::Divergent);
}

TEST(Classify, FlatSpaceIsNonparabolic) {
  const auto c = classify(example("flat3"));
  EXPECT_EQ(c.parabolicity, Parabolicity::Nonparabolic);
  EXPECT_EQ(c.m_parabolicity, MParabolicity::MNonparabolic);
  const auto* phi = c.find("phi_cross_check");
  ASSERT_NE(phi, nullptr);
  EXPECT_EQ(phi->certificate->verdict, Verdict::Convergent);
}

TEST(Classify, HyperbolicIsNonparabolic) {
  const auto c = classify(example("hyperbolic_like"));
  EXPECT_EQ(c.parabolicity, Parabolicity::Nonparabolic);
  EXPECT_EQ(c.m_parabolicity, MParabolicity::MNonparabolic);
}

TEST(Classify, CylinderIsParabolic) {
  const auto c = classify(example("cylinder"));
  EXPECT_EQ(c.parabolicity, Parabolicity::Parabolic);
  EXPECT_EQ(c.m_parabolicity, MParabolicity::MParabolic);
}

TEST(Classify, ExponentialDecayIsMParabolicAndParabolic) {
  const auto c = classify(example("exp_warp"));
  EXPECT_EQ(c.parabolicity, Parabolicity::Parabolic);
  EXPECT_EQ(c.m_parabolicity, MParabolicity::MParabolic);
}

TEST(Classify, NeckedPoleSeparatesTheTwoNotions) {
  for (int n : {2, 3}) {
    const auto c = classify(build(ExampleSpec{"prop2_6", {{"n", n}}}));
    EXPECT_EQ(c.parabolicity, Parabolicity::Nonparabolic) << n;
    EXPECT_EQ(c.m_parabolicity, MParabolicity::MParabolic) << n;
    const auto* neck = c.find("neck_cutoff");
    ASSERT_NE(neck, nullptr);
    ASSERT_GE(neck->witness_values.size(), 3u);
    for (std::size_t i = 1; i < neck->witness_values.size(); ++i)
      EXPECT_LT(neck->witness_values[i], neck->witness_values[i - 1]);
    EXPECT_LT(neck->witness_values.back(), 1e-3);
    // record necks past the scan start sit at multiples of pi
    for (double r : neck->witness_radii) {
      if (r < std::numbers::pi / 2) continue;
      const double k = std::round(r / std::numbers::pi);
      EXPECT_NEAR(r, k * std::numbers::pi, 1e-6 * r);
    }
  }
}

TEST(Classify, EveryClaimedVerdictIsReproduced) {
  for (const std::string id : {"flat2", "flat3", "cylinder", "hyperbolic_like", "exp_warp", "neck_cylinder"}) {
    const auto spec = parse_example_id(id);
    const auto claim = claimed_verdict(spec);
    ASSERT_TRUE(claim.has_value()) << id;
    const auto c = classify(build(spec));
    EXPECT_EQ(c.parabolicity, claim->parabolicity) << id;
    EXPECT_EQ(c.m_parabolicity, claim->m_parabolicity) << id;
  }
}

TEST(Classify, JsonListsEvidence) {
  const auto j = to_json(classify(example("flat3")));
  EXPECT_EQ(j.at("parabolicity").get<std::string>(), "nonparabolic");
  EXPECT_TRUE(j.at("evidence").is_array());
  EXPECT_FALSE(j.at("evidence").empty());
}

TEST(BoundaryTest, CylinderIsNondegenerate) {
  const auto b = nondegenerate_boundary_test(example("cylinder"), 1.0, 1e4);
  EXPECT_EQ(b.verdict, BoundaryVerdict::Nondegenerate);
  EXPECT_GT(b.epsilon, 0.0);
}

TEST(BoundaryTest, NeckedPoleIsDegenerate) {
  const auto b = nondegenerate_boundary_test(build(ExampleSpec{"prop2_6", {{"n", 2}}}), 1.0, 1e4);
  EXPECT_EQ(b.verdict, BoundaryVerdict::Degenerate);
  for (std::size_t i = 1; i < b.record_areas.size(); ++i) EXPECT_LT(b.record_areas[i], b.record_areas[i - 1]);
}

TEST(SliceConvergence, DecreasesOnNeckedPole) {
  const auto m = build(ExampleSpec{"prop2_6", {{"n", 2}}});
  std::vector<double> R;
  for (int k = 1; k <= 6; ++k) R.push_back(k * std::numbers::pi);
  const auto s = slice_convergence(m, 1.0, 1.0, R, 2.0);
  ASSERT_EQ(s.sups.size(), R.size());
  EXPECT_TRUE(s.monotone);
  EXPECT_LT(s.sups.back(), 0.05);
}

TEST(SliceConvergence, NeedsMParabolicManifold) {
  EXPECT_THROW(slice_convergence(example("flat3"), 1.0, 1.0, {2.0, 4.0}, 1.5), PreconditionError);
}

TEST(SliceConvergence, TrivialOnThePlane) {
  const auto s = slice_convergence(example("flat2"), 1.0, 0.5, {10.0, 100.0, 1000.0}, 2.0);
  for (double v : s.sups) EXPECT_LT(v, 0.5);
  EXPECT_TRUE(s.monotone);
}
