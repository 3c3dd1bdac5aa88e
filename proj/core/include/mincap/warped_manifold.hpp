#pragma once

#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mincap/quadrature.hpp"
#include "mincap/warp.hpp"

namespace mincap {

/// Volume of the unit n-ball, pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/// Rotationally symmetric manifold dr^2 + w(r)^2 dtheta^2 over S^{n-1}.
///
/// `kappa` is the radial exponent of the Laplacian used for harmonic
/// functions, phi'' + kappa (w'/w) phi' = 0. The geometric value is n - 1;
/// kappa = n reproduces the "n f'/f" form used for the necked pole example.
/// Values are immutable and safe to share.
class WarpedManifold {
 public:
  WarpedManifold(int n, WarpPtr warp, int kappa, Closure closure, double r_min);
  /// Closure, inner radius and kappa = n - 1 taken from the warp's defaults.
  WarpedManifold(int n, WarpPtr warp);

  int dimension() const noexcept { return n_; }
  int kappa() const noexcept { return kappa_; }
  Closure closure() const noexcept { return closure_; }
  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return warp_->domain_max(); }
  const WarpFunction& warp_function() const noexcept { return *warp_; }
  WarpPtr warp_ptr() const noexcept { return warp_; }

  WarpedManifold with_kappa(int kappa) const;

  /// w(r); throws InputError outside [r_min, r_max] or where w is not positive.
  double warp(double r) const;
  /// w(r)^{n-1}, the area density of the radial sphere divided by n omega_n.
  double weight(double r) const;
  /// n omega_n, area of the unit (n-1)-sphere.
  double unit_sphere_area() const noexcept { return unit_sphere_area_; }
  double sphere_area(double r) const { return unit_sphere_area_ * weight(r); }

  /// Volume of the geodesic ball B_r about the pole. Requires a smooth pole.
  double ball_volume(double r, double rel_tol = 1e-10) const;

  /// Sorted {a, critical points of the warp strictly inside, b}.
  std::vector<double> breakpoints(double a, double b) const;

  /// Integral of w^p over [a, b] (finite b).
  double integrate_power(double p, double a, double b, double rel_tol = 1e-11) const;

  /// Certificate for the integral of w^p over [r0, inf).
  IntegralCertificate improper_integral(double p, double r0, const quad::TailOptions& options = {}) const;

  /// Divergence test for the integral of w over [1, inf) (completeness as stated
  /// for the e^{-f} form of the metric).
  IntegralCertificate completeness_test(const quad::TailOptions& options = {}) const;

  struct Minimum {
    double value;
    double location;
  };
  /// Infimum of w^{n-1} over [a, b]: geometric scan (64 per decade), all
  /// critical points and endpoints, then Brent refinement of the best sample.
  Minimum weight_infimum(double a, double b) const;

  nlohmann::json to_json() const;
  static WarpedManifold from_json(const nlohmann::json& doc);

 private:
  void check_domain(double r) const;

  int n_;
  WarpPtr warp_;
  int kappa_;
  Closure closure_;
  double r_min_;
  double unit_sphere_area_;
};

/// Geometric radius grid with `per_decade` points per factor 10 (at least `min_points`).
std::vector<double> log_grid(double a, double b, int per_decade, int min_points = 2);

}  // namespace mincap
