#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "mincap/classifier.hpp"
#include "mincap/radial_solver.hpp"
#include "mincap/warped_manifold.hpp"

namespace mincap {

/// Phi(r) = integral over [r, inf) of s / V(s), V the volume of B_s about the pole.
IntegralCertificate phi_integral(const WarpedManifold& m, double r, const quad::TailOptions& options = {});
/// Same with a caller-supplied volume function (no pole required).
IntegralCertificate phi_integral(const std::function<double(double)>& volume, double r,
                                 const quad::TailOptions& options = {});

/// Uniform grid field in one or two dimensions; values are row-major (y outer).
struct GridField {
  int dim = 1;
  std::size_t nx = 0;
  std::size_t ny = 1;
  double h = 0;
  double x0 = 0;
  double y0 = 0;
  std::vector<double> values;

  double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
  double y(std::size_t j) const { return y0 + h * static_cast<double>(j); }
  double& at(std::size_t i, std::size_t j = 0) { return values[j * nx + i]; }
  double at(std::size_t i, std::size_t j = 0) const { return values[j * nx + i]; }
  static GridField sample(int dim, std::size_t nx, std::size_t ny, double h, double x0, double y0,
                          const std::function<double(double, double)>& f);
};

struct MollifyResult {
  GridField field;
  std::vector<double> gradient_norm;  // |D f_lambda| per grid point
  double sup_f = 0;
  double sup_gradient = 0;
  /// sup |D f_lambda| * lambda / sup |f|
  double gradient_ratio = 0;
  /// sup_x (sqrt(1 + |D f_lambda|^2) - 1) / mean over B_lambda(x) of (sqrt(1 + |Df|^2) - 1)
  double energy_ratio = 0;
};

/// f_lambda(x) = sum_y (lambda - |y - x|)_+ f(y) / sum_y (lambda - |y - x|)_+ over grid
/// cells in the domain; this is the tau-averaged ball mean with the tau
/// integral done exactly. Needs lambda >= 8 h.
MollifyResult mollify(const GridField& f, double lambda);

struct FluxReport {
  double norm = 0;     // n omega_n q
  double cap_t = 0;
  double t = 0;
  double lower = 0;    // cap_t / t
  double upper = 0;    // 2 cap_t / t
  bool window_holds = true;
  double margin = 0;   // min(norm - lower, upper - norm), relative to upper
};

/// Co-normal mass of a radial solution and the window cap_t/t <= |mu| <= 2 cap_t/t.
FluxReport flux_from_profile(const WarpedManifold& m, const RadialProfile& p, const RadialOptions& opts = {});

/// n omega_n times the integral over {u < lambda} of u'^2 w^{n-1} / sqrt(1 + u'^2),
/// including vertical walls at boundary jumps.
double slice_integral(const WarpedManifold& m, const RadialProfile& p, double lambda, const RadialOptions& opts = {});

struct AsymptoticAudit {
  double t = 0;
  double r_a = 0;
  double cap_t = 0;
  std::vector<double> radii;
  std::vector<double> u_values;
  std::vector<double> phi_values;
  std::vector<double> ratios;
  double theta_star = 1;
  double theta_star_half = 1;  // from the first half of the radii
  double spread = 0;           // max ratio / min ratio - 1
  bool stable = false;
};

AsymptoticAudit asymptotic_audit(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                 const Classification& classification);
AsymptoticAudit asymptotic_audit(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list);
nlohmann::json to_json(const AsymptoticAudit& a);

struct SandwichRow {
  double r = 0;
  double cap_t = 0;    // cap_t(B_r) over the whole manifold
  double phi = 0;
  double ratio = 0;    // (t^2 / cap_t) / Phi(r)
  double R = 0;        // outer radius 4r for the annulus comparison
  double cap_t_annulus = 0;
  double cap_annulus = 0;
  double cap_shifted = 0;  // cap(B_{r/2}, B_{R + r/2})
  double upper_bound = 0;  // (t^2/2) cap(B_r, B_R)
  bool upper_holds = false;
  double beta = 0;         // t^2 cap_shifted / cap_t_annulus
  double quadratic_ratio = 0;  // cap_t_annulus / upper_bound
};

struct SandwichAudit {
  double t = 0;
  std::vector<SandwichRow> rows;
  double vartheta_star = 1;
  double beta_star = 0;
  bool upper_holds = true;
  bool stable = false;
};

SandwichAudit capacity_sandwich_audit(const WarpedManifold& m, const std::vector<double>& r_list, double t,
                                      const Classification& classification);
SandwichAudit capacity_sandwich_audit(const WarpedManifold& m, const std::vector<double>& r_list, double t);
nlohmann::json to_json(const SandwichAudit& a);

}  // namespace mincap
