#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mincap/classifier.hpp"
#include "mincap/warped_manifold.hpp"

namespace mincap {

/// Canned manifold: an id from {flat, cylinder, hyperbolic_like, power, prop2_6,
/// exp_warp, staircase, neck_cylinder} plus its parameters.
struct ExampleSpec {
  std::string id;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
  static ExampleSpec from_json(const nlohmann::json& doc);
};

/// Builds the manifold. prop2_6 uses kappa = n, every other id kappa = n - 1.
/// Throws InputError on unknown ids or out-of-range parameters.
WarpedManifold build(const ExampleSpec& spec);

/// Parses command-line shorthands: "flat2", "flat3", "prop2_6", "prop2_6_n3",
/// "exp_warp", "power", ... Plain ids take their default parameters.
ExampleSpec parse_example_id(const std::string& text);

std::vector<std::string> example_ids();

struct ClaimedVerdict {
  Parabolicity parabolicity;
  MParabolicity m_parabolicity;
};
/// Known classification of an example, when it is a theorem rather than a measurement.
std::optional<ClaimedVerdict> claimed_verdict(const ExampleSpec& spec);

}  // namespace mincap
