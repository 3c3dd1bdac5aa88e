#include "mincap/examples.hpp"

#include <cmath>
#include <regex>

#include "mincap/error.hpp"

namespace mincap {
namespace {

using nlohmann::json;

int dimension(const json& p, int fallback = 2) {
  const int n = p.value("n", fallback);
  if (n < 2 || n > 12) throw InputError("example dimension n must lie in [2, 12]");
  return n;
}

double positive(const json& p, const char* key, double fallback) {
  const double v = p.value(key, fallback);
  if (!(v > 0) || !std::isfinite(v)) throw InputError(std::string("example parameter ") + key + " must be positive");
  return v;
}

}  // namespace

json ExampleSpec::to_json() const { return {{"id", id}, {"params", params}}; }

ExampleSpec ExampleSpec::from_json(const json& doc) {
  try {
    return ExampleSpec{doc.at("id").get<std::string>(), doc.value("params", json::object())};
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed example spec: ") + e.what());
  }
}

WarpedManifold build(const ExampleSpec& spec) {
  if (!spec.params.is_null() && !spec.params.is_object()) throw InputError("example params must be an object");
  const json p = spec.params.is_null() ? json::object() : spec.params;
  try {
    if (spec.id == "flat") return WarpedManifold(dimension(p), make_builtin_warp("flat", {}));
    if (spec.id == "cylinder") return WarpedManifold(dimension(p), make_builtin_warp("cylinder", {}));
    if (spec.id == "hyperbolic_like") return WarpedManifold(dimension(p), make_builtin_warp("hyperbolic", {}));
    if (spec.id == "power") {
      const double alpha = positive(p, "alpha", 1.0);
      return WarpedManifold(dimension(p), make_builtin_warp("power", {{"alpha", alpha}}));
    }
    if (spec.id == "prop2_6") {
      const int n = dimension(p);
      return WarpedManifold(n, make_builtin_warp("prop2_6", {{"n", n}}), n, Closure::SmoothPole, 0.0);
    }
    if (spec.id == "exp_warp") {
      const int n = dimension(p);
      const double lambda = positive(p, "lambda", 1.0);
      return WarpedManifold(n, make_builtin_warp("exp", {{"lambda", lambda}, {"n", n}}));
    }
    if (spec.id == "staircase") {
      const int n = dimension(p);
      return WarpedManifold(n, make_builtin_warp("staircase", {{"n", n}, {"mollified", p.value("mollified", false)}}));
    }
    if (spec.id == "neck_cylinder") {
      return WarpedManifold(dimension(p), make_builtin_warp("neck_cylinder", {{"spacing", positive(p, "spacing", 4.0)},
                                                                              {"width", positive(p, "width", 0.4)},
                                                                              {"ratio", p.value("ratio", 0.5)}}));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad example parameters: ") + e.what());
  }
  throw InputError("unknown example id: " + spec.id);
}

ExampleSpec parse_example_id(const std::string& text) {
  static const std::regex with_n(R"((flat|cylinder|hyperbolic_like|prop2_6|exp_warp|staircase|power|neck_cylinder)(?:_n)?(\d+))");
  std::smatch m;
  if (text == "prop2_6" || text == "flat" || text == "cylinder" || text == "hyperbolic_like" || text == "power" ||
      text == "exp_warp" || text == "staircase" || text == "neck_cylinder")
    return ExampleSpec{text, json::object()};
  if (std::regex_match(text, m, with_n))
    return ExampleSpec{m[1].str(), {{"n", std::stoi(m[2].str())}}};
  throw InputError("unknown example id: " + text);
}

std::vector<std::string> example_ids() {
  return {"flat", "cylinder", "hyperbolic_like", "power", "prop2_6", "exp_warp", "staircase", "neck_cylinder"};
}

std::optional<ClaimedVerdict> claimed_verdict(const ExampleSpec& spec) {
  const int n = spec.params.is_object() ? spec.params.value("n", 2) : 2;
  if (spec.id == "flat")
    return n == 2 ? ClaimedVerdict{Parabolicity::Parabolic, MParabolicity::MParabolic}
                  : ClaimedVerdict{Parabolicity::Nonparabolic, MParabolicity::MNonparabolic};
  if (spec.id == "cylinder" || spec.id == "neck_cylinder" || spec.id == "exp_warp")
    return ClaimedVerdict{Parabolicity::Parabolic, MParabolicity::MParabolic};
  if (spec.id == "hyperbolic_like") return ClaimedVerdict{Parabolicity::Nonparabolic, MParabolicity::MNonparabolic};
  if (spec.id == "prop2_6") return ClaimedVerdict{Parabolicity::Nonparabolic, MParabolicity::MParabolic};
  return std::nullopt;
}

}  // namespace mincap
