#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mincap/radial_solver.hpp"
#include "mincap/warped_manifold.hpp"

namespace mincap {

enum class CapacityMethod { ClosedForm, Shooting, Discrete, Exhaustion };
std::string to_string(CapacityMethod m);

struct SolverDiagnostics {
  int iterations = 0;
  double residual = 0;        // |drop - t| for shooting, projected gradient norm for Newton
  bool converged = true;
  std::vector<double> objective_history;
  std::string note;
};

/// Capacity value together with the interior/trace decomposition
/// value = interior_area + trace_inner + trace_outer.
struct CapacityResult {
  double value = 0;
  std::optional<double> t;  // empty for the classical capacity
  double inner_r = 0;
  double outer_r = 0;       // +inf for limits over exhausting balls
  CapacityMethod method = CapacityMethod::ClosedForm;
  double interior_area = 0;
  double trace_inner = 0;
  double trace_outer = 0;
  /// Classical capacity with a divergent normalizer on an unbounded annulus.
  bool parabolic = false;
  /// Exhaustion: the sequence (R_i, cap_t(B_{r_a}, B_{R_i})).
  std::vector<double> sequence_radii;
  std::vector<double> sequence_values;
  double tail_estimate = 0;
  bool m_parabolic_suspect = false;
  SolverDiagnostics diagnostics;
};

nlohmann::json to_json(const CapacityResult& r);

/// cap(B_{r_a}, B_{r_b}) = n omega_n c^2 * integral of w^{n-1-2 kappa}, c the
/// harmonic normalizer. r_b may be +inf.
CapacityResult classical_capacity(const WarpedManifold& m, double r_a, double r_b);

/// cap_t(B_{r_a}, B_{r_b}) from the shooting profile. t = 0 gives 0.
CapacityResult minimal_capacity(const WarpedManifold& m, double r_a, double r_b, double t,
                                const RadialOptions& opts = {}, RadialProfile* profile = nullptr);

struct DiscreteOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-10;  // relative to 1 + |J|
};

struct DiscreteSolution {
  RadialProfile profile;
  CapacityResult result;
};

/// Minimizes J(u) = n omega_n sum_j (sqrt(1 + s_j^2) - 1) Wbar_j dr_j over nodal
/// values by projected damped Newton, s_j the cell slope and Wbar_j the cell
/// average of w^{n-1}. Dirichlet mode fixes u = t at r_a and u = 0 at r_b;
/// relaxed mode frees both ends and charges sphere_area(r_a)(t - u_0) +
/// sphere_area(r_b) u_N. All nodes are kept in [0, t].
DiscreteSolution discrete_minimize(const WarpedManifold& m, const std::vector<double>& grid, double t, bool relaxed,
                                   const DiscreteOptions& opts = {});

/// Geometric grid on [r_a, r_b] (uniform when r_a = 0) with `cells` cells.
std::vector<double> make_grid(double r_a, double r_b, int cells);

struct ExhaustionOptions {
  RadialOptions radial;
  double convergence_rel = 1e-6;
  /// Limit below this flags M-parabolic suspicion; negative selects 1e-4 t sphere_area(r_a).
  double suspect_threshold = -1;
};

/// cap_t(B_{r_a}, B_R) over increasing R; the limit is the last value and the
/// tail estimate extrapolates the last three decrements geometrically.
CapacityResult capacity_exhaustion(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                   const ExhaustionOptions& opts = {});

struct ScalingAudit {
  double t = 0;
  double T = 0;
  double cap_t = 0;
  double cap_T = 0;
  double cap = 0;
  /// Slack of each inequality, nonnegative when it holds.
  double linear_slack = 0;     // cap_T - (T/t) cap_t
  double quadratic_slack = 0;  // (T/t)^2 cap_t - cap_T
  double dirichlet_slack = 0;  // (t^2/2) cap - cap_t
  bool linear_ok = false;
  bool quadratic_ok = false;
  bool dirichlet_ok = false;
  bool passed() const { return linear_ok && quadratic_ok && dirichlet_ok; }
};

/// Checks (T/t) cap_t <= cap_T <= (T/t)^2 cap_t and cap_t <= (t^2/2) cap with
/// relative slack 1e-6.
ScalingAudit scaling_audit(const WarpedManifold& m, double r_a, double r_b, double t, double T,
                           const RadialOptions& opts = {});
nlohmann::json to_json(const ScalingAudit& a);

/// Closed-form sums on the piecewise-constant staircase weight, cross-checked
/// by the radial solver on both the sharp and the ramp-mollified weight.
struct StaircaseReport {
  int i = 0;
  int k = 0;
  int n = 2;
  double E_k_at_alpha_k = 0;
  bool E_k_exact = false;
  double alpha_lower = 0;   // (1 + 2^{-k})^{-2}
  double alpha_k = 0;       // (1 + 2^{-2k})(1 + 2^{-k})^{-2}
  double alpha_ki = 0;
  double epsilon_ki = 0;    // alpha_ki = (1 + epsilon_ki)(1 + 2^{-k})^{-2}
  double I_at_alpha_ki = 0;
  int bisection_iterations = 0;
  bool bracket_ok = true;
  double I_at_bracket_low = 0;
  double I_at_bracket_high = 0;
  double cap = 0;
  double cap_bound = 0;     // 3 n omega_n alpha_ki^{-1/2}
  double cap_limit = 0;     // 3 n omega_n
  bool cap_within_bound = false;
  bool cap_within_limit = false;
  double u_at_s_k = 0;
  bool interior_condition = false;  // u(s_k) > 2
  // radial solver on the sharp staircase
  double solver_alpha = 0;
  double solver_cap = 0;
  // radial solver on the mollified staircase
  double mollified_alpha = 0;
  double mollified_drop = 0;
  double mollified_cap = 0;
  double mollified_cap_bound = 0;
  double mollified_u_at_s_k = 0;
  bool mollified_cap_within_bound = false;
  bool mollified_interior_condition = false;
};

/// E_k at alpha_k = (1 + 2^{-2k})(1 + 2^{-k})^{-2}, evaluated without cancellation.
double staircase_E_k(int k);
/// I_{i,k} and E_k at alpha = (1 + epsilon)(1 + 2^{-k})^{-2}.
double staircase_I(int i, int k, double epsilon);
double staircase_E(int k, double epsilon);
/// Radial cap_3 on the sharp staircase at alpha = (1 + epsilon)(1 + 2^{-k})^{-2}, per unit n omega_n.
double staircase_capacity_sum(int i, int k, double epsilon);

StaircaseReport staircase_reproduction(int i, int k, int n = 2, bool run_solver = true);
nlohmann::json to_json(const StaircaseReport& r);

}  // namespace mincap
