#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mincap {

/// Whether the radial coordinate closes up smoothly at r = 0 or the manifold
/// carries an inner boundary sphere at r = r_min.
enum class Closure { SmoothPole, OpenInner };

std::string to_string(Closure c);

/// Positive radial warp w(r) of dr^2 + w(r)^2 dtheta^2.
class WarpFunction {
 public:
  virtual ~WarpFunction() = default;

  virtual double value(double r) const = 0;

  /// Radii in [lo, hi] where the warp has a kink, a plateau edge or a neck.
  /// Quadrature splits there and minimum searches always sample them.
  virtual std::vector<double> critical_points(double lo, double hi) const {
    (void)lo;
    (void)hi;
    return {};
  }

  virtual double domain_min() const { return 0.0; }
  virtual double domain_max() const { return std::numeric_limits<double>::infinity(); }
  virtual Closure natural_closure() const { return Closure::SmoothPole; }

  virtual nlohmann::json to_json() const = 0;
};

using WarpPtr = std::shared_ptr<const WarpFunction>;

enum class Interpolation { Linear, MonotoneCubic };

WarpPtr make_expression_warp(const std::string& source);
WarpPtr make_table_warp(std::vector<double> radii, std::vector<double> values, Interpolation interp);

/// Closed-form warps of the canned examples. Names: flat, cylinder, hyperbolic,
/// power{alpha}, cylinder_cap, prop2_6{n}, exp{lambda,n}, staircase{n,mollified},
/// neck_cylinder{spacing,width,ratio}.
WarpPtr make_builtin_warp(const std::string& name, const nlohmann::json& params);

WarpPtr warp_from_json(const nlohmann::json& doc);

}  // namespace mincap
