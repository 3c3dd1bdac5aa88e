#pragma once

#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "mincap/warped_manifold.hpp"

namespace mincap {

/// Radial BV minimal graph on the annulus r_a < r < r_b, nonincreasing from the
/// inner trace t - jump_inner to the outer trace jump_outer.
///
/// The flux constant q = w^{n-1} |u'| / sqrt(1 + |u'|^2) is conserved along the
/// graph. Writing w = e^{-f} and q = e^{-(n-1)c} turns the slope
/// q / sqrt(w^{2(n-1)} - q^2) into (e^{-2(n-1)(f-c)} - 1)^{-1/2}, the same
/// first integral with c >= f on the annulus.
struct RadialProfile {
  double r_inner = 0;
  double r_outer = 0;  // may be +inf
  double t = 0;
  double flux_q = 0;
  double jump_inner = 0;
  double jump_outer = 0;
  /// Interior drop u(r_a+) - u(r_b-).
  double drop = 0;
  bool attached = true;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> slopes;  // u'(r) <= 0
  int root_iterations = 0;
};

struct RadialOptions {
  double rel_tol = 1e-11;
  double drop_tol = 1e-12;   // absolute tolerance on drop = t
  int grid_points = 257;
  double grid_outer = 0;     // last grid radius when r_b = inf (0: 64 r_a)
  quad::TailOptions tail{1e-13, 1e30, 1e6};
};

/// |u'| at r for flux constant q; throws SingularInputError when q >= w^{n-1}(r).
double minimal_slope(const WarpedManifold& m, double r, double q);

/// Integral of minimal_slope over [r_a, r_b]; r_b may be +inf.
double integrate_drop(const WarpedManifold& m, double r_a, double r_b, double q, const RadialOptions& opts = {});

/// n omega_n * integral of (sqrt(1 + u'^2) - 1) w^{n-1} over [r_a, r_b] for flux q.
double interior_area(const WarpedManifold& m, double r_a, double r_b, double q, const RadialOptions& opts = {});

/// Radial capacity minimizer with prescribed gap t between the inner and outer
/// boundary values. Attached when some q gives drop = t; otherwise the flux
/// is chosen from {w^{n-1}(r_a), w^{n-1}(r_b), inf w^{n-1}} by objective value
/// and the residual gap becomes a boundary jump.
RadialProfile shoot_for_drop(const WarpedManifold& m, double r_a, double r_b, double t, const RadialOptions& opts = {});

/// u at radius r of a computed profile (exact quadrature, not interpolation).
double profile_value(const WarpedManifold& m, const RadialProfile& p, double r, const RadialOptions& opts = {});

/// Profile objective: interior relaxed area plus lateral wall areas.
struct ProfileObjective {
  double interior = 0;
  double trace_inner = 0;
  double trace_outer = 0;
  double total() const { return interior + trace_inner + trace_outer; }
};
ProfileObjective profile_objective(const WarpedManifold& m, const RadialProfile& p, const RadialOptions& opts = {});

/// Radial harmonic function phi(r) = 1 - c * integral_{r_a}^r w^{-kappa}.
struct HarmonicProfile {
  double r_inner = 0;
  double r_outer = 0;
  double c = 0;               // normalizing constant; 0 for the parabolic signal
  bool parabolic_signal = false;
  IntegralCertificate normalizer;  // integral of w^{-kappa} over [r_a, r_b]
  std::vector<double> grid;
  std::vector<double> values;
};
HarmonicProfile radial_harmonic(const WarpedManifold& m, double r_a, double r_b, int grid_points = 129);

/// Comparison barrier phi(s) = int_0^s ((1 + eps^-2) e^{2 Lambda sigma} - 1)^{-1/2}
/// solving Lambda phi' + phi'' / (1 + phi'^2) = 0 with phi'(0) = eps.
class Barrier {
 public:
  Barrier(double epsilon, double Lambda, double tau);

  double value(double s) const;
  double derivative(double s) const;
  double second_derivative(double s) const;
  /// (1 + eps^-2)^{-1/2} Lambda^{-1} (1 - e^{-Lambda tau}); phi(tau) >= this.
  double lambda_eps() const noexcept { return lambda_eps_; }
  double tau() const noexcept { return tau_; }

 private:
  double epsilon_;
  double Lambda_;
  double tau_;
  double lambda_eps_;
};

/// Largest interior drop on the warp w^{n-1} = e^{-lambda r} over flux levels
/// q = e^{-lambda T}, T in [r_b, r_b + T_span]:
/// (1/lambda)(arccos e^{-lambda(T - r_a)} - arccos e^{-lambda(T - r_b)}).
double oscillation_sup(double lambda, double r_a, double r_b, double T_span);

/// Closed-form drop of the exponential warp at level T (helper for the above).
double exponential_drop(double lambda, double r_a, double r_b, double T);

nlohmann::json to_json(const RadialProfile& p);

}  // namespace mincap
