#include <cmath>
#include <numbers>

#include "mincap/capacity.hpp"
#include "mincap/error.hpp"
#include "mincap/warp.hpp"

namespace mincap {
namespace {

// Staircase geometry: neck j is (2^j - 2^{-j}, 2^j + 2^{-j}) with weight 1 + 2^{-j};
// plateau j fills [2^j + 2^{-j}, 2^{j+1} - 2^{-j-1}] with weight 2^{j^2}.
double neck_width(int j) { return std::ldexp(1.0, 1 - j); }
double plateau_length(int j) { return std::ldexp(1.0, j) - std::ldexp(1.0, -j - 1) - std::ldexp(1.0, -j); }
double plateau_weight(int j) { return std::exp2(static_cast<double>(j) * j); }

// With alpha = (1 + eps)(1 + x)^{-2}, x = 2^{-k}, and a neck weight 1 + y:
// alpha (1 + y)^2 - 1 = [(y - x)(2 + x + y) + eps (1 + y)^2] / (1 + x)^2.
double neck_bracket(int j, int k, double eps) {
  const double x = std::ldexp(1.0, -k);
  const double y = std::ldexp(1.0, -j);
  return (y - x) * (2 + x + y) + eps * (1 + y) * (1 + y);
}

double neck_slope(int j, int k, double eps) {
  const double x = std::ldexp(1.0, -k);
  return (1 + x) / std::sqrt(neck_bracket(j, k, eps));
}

// (alpha F^2 - 1)^{-1/2} for a plateau weight F.
double plateau_slope(int j, int k, double eps) {
  const double x = std::ldexp(1.0, -k);
  const double sqrt_alpha = std::sqrt(1 + eps) / (1 + x);
  const double F = plateau_weight(j);
  const double z = 1 / (sqrt_alpha * F * sqrt_alpha * F);
  return 1 / (F * sqrt_alpha * std::sqrt(1 - z));
}

void check_indices(int i, int k) {
  if (!(i >= 1 && i < k && k <= 25)) throw InputError("staircase indices need 1 <= i < k <= 25");
}

}  // namespace

double staircase_E(int k, double epsilon) { return neck_width(k) * neck_slope(k, k, epsilon); }

double staircase_E_k(int k) {
  if (k < 1 || k > 25) throw InputError("staircase index k must lie in [1, 25]");
  const double x = std::ldexp(1.0, -k);
  return staircase_E(k, x * x);
}

double staircase_I(int i, int k, double epsilon) {
  check_indices(i, k);
  double s = 0;
  for (int j = i; j <= k; ++j) s += neck_width(j) * neck_slope(j, k, epsilon);
  for (int j = i; j < k; ++j) s += plateau_length(j) * plateau_slope(j, k, epsilon);
  return s;
}

// Per piece, (sqrt(1 + u'^2) - 1) F = F / ((sqrt(alpha) F + sqrt(alpha F^2 - 1)) sqrt(alpha F^2 - 1)).
double staircase_capacity_sum(int i, int k, double epsilon) {
  check_indices(i, k);
  const double x = std::ldexp(1.0, -k);
  const double root_eps = std::sqrt(1 + epsilon);
  double s = 0;
  for (int j = i; j <= k; ++j) {
    const double y = std::ldexp(1.0, -j);
    const double b = std::sqrt(neck_bracket(j, k, epsilon));
    s += neck_width(j) * (1 + y) * (1 + x) * (1 + x) / ((root_eps * (1 + y) + b) * b);
  }
  for (int j = i; j < k; ++j) {
    const double alpha = (1 + epsilon) / ((1 + x) * (1 + x));
    const double F = plateau_weight(j);
    const double z = 1 / (alpha * F * F);
    const double root = std::sqrt(1 - z);
    s += plateau_length(j) / (alpha * F * (1 + root) * root);
  }
  return s;
}

StaircaseReport staircase_reproduction(int i, int k, int n, bool run_solver) {
  check_indices(i, k);
  if (n < 2) throw InputError("dimension must be >= 2");
  StaircaseReport r;
  r.i = i;
  r.k = k;
  r.n = n;
  const double x = std::ldexp(1.0, -k);
  const double area = n * unit_ball_volume(n);

  r.E_k_at_alpha_k = staircase_E_k(k);
  r.E_k_exact = r.E_k_at_alpha_k == 2.0;
  r.alpha_lower = 1 / ((1 + x) * (1 + x));
  r.alpha_k = (1 + x * x) * r.alpha_lower;

  // I decreases in eps on (0, (1 + x)^2 - 1]; bisect geometrically from a tiny eps.
  const double eps_max = x * (2 + x);
  double lo = eps_max * 1e-40;
  double hi = eps_max;
  r.I_at_bracket_low = staircase_I(i, k, lo);
  r.I_at_bracket_high = staircase_I(i, k, hi);
  r.bracket_ok = r.I_at_bracket_low > 3 && r.I_at_bracket_high < 3;
  if (r.bracket_ok) {
    for (int it = 0; it < 400; ++it) {
      const double mid = std::sqrt(lo * hi);
      const double mid_lin = 0.5 * (lo + hi);
      const double m = hi / lo > 4 ? mid : mid_lin;
      if (m <= lo || m >= hi) break;
      (staircase_I(i, k, m) > 3 ? lo : hi) = m;
      r.bisection_iterations = it + 1;
    }
    const double dlo = std::abs(staircase_I(i, k, lo) - 3);
    const double dhi = std::abs(staircase_I(i, k, hi) - 3);
    r.epsilon_ki = dlo <= dhi ? lo : hi;
  } else {
    r.epsilon_ki = r.I_at_bracket_high >= 3 ? hi : lo;
  }
  r.alpha_ki = (1 + r.epsilon_ki) * r.alpha_lower;
  r.I_at_alpha_ki = staircase_I(i, k, r.epsilon_ki);
  r.cap = area * staircase_capacity_sum(i, k, r.epsilon_ki);
  r.cap_bound = 3 * area / std::sqrt(r.alpha_ki);
  r.cap_limit = 3 * area;
  r.cap_within_bound = r.cap <= r.cap_bound * (1 + 1e-6);
  r.cap_within_limit = r.cap <= r.cap_limit * (1 + 1e-6);
  r.u_at_s_k = staircase_E(k, r.epsilon_ki);
  r.interior_condition = r.u_at_s_k > 2;

  if (run_solver) {
    const double s_i = std::ldexp(1.0, i) - std::ldexp(1.0, -i);
    const double s_k = std::ldexp(1.0, k) - std::ldexp(1.0, -k);
    const double r_k = std::ldexp(1.0, k) + std::ldexp(1.0, -k);
    RadialOptions opts;
    opts.grid_points = 2;
    {
      const WarpedManifold m(n, make_builtin_warp("staircase", {{"n", n}, {"mollified", false}}));
      RadialProfile p;
      r.solver_cap = minimal_capacity(m, s_i, r_k, 3.0, opts, &p).value;
      r.solver_alpha = 1 / (p.flux_q * p.flux_q);
    }
    {
      const WarpedManifold m(n, make_builtin_warp("staircase", {{"n", n}, {"mollified", true}}));
      RadialProfile p;
      r.mollified_cap = minimal_capacity(m, s_i, r_k, 3.0, opts, &p).value;
      r.mollified_alpha = 1 / (p.flux_q * p.flux_q);
      r.mollified_drop = p.drop;
      r.mollified_cap_bound = 3 * area / std::sqrt(r.mollified_alpha);
      r.mollified_cap_within_bound = r.mollified_cap <= r.mollified_cap_bound * (1 + 1e-6);
      r.mollified_u_at_s_k = profile_value(m, p, s_k, opts);
      r.mollified_interior_condition = r.mollified_u_at_s_k > 2;
    }
  }
  return r;
}

nlohmann::json to_json(const StaircaseReport& r) {
  return {{"i", r.i},
          {"k", r.k},
          {"n", r.n},
          {"E_k_at_alpha_k", r.E_k_at_alpha_k},
          {"E_k_equals_2", r.E_k_exact},
          {"alpha_lower", r.alpha_lower},
          {"alpha_k", r.alpha_k},
          {"alpha_ki", r.alpha_ki},
          {"epsilon_ki", r.epsilon_ki},
          {"I_at_alpha_ki", r.I_at_alpha_ki},
          {"bisection_iterations", r.bisection_iterations},
          {"bracket_ok", r.bracket_ok},
          {"I_at_bracket_low", r.I_at_bracket_low},
          {"I_at_bracket_high", r.I_at_bracket_high},
          {"cap", r.cap},
          {"cap_bound", r.cap_bound},
          {"cap_limit_3nwn", r.cap_limit},
          {"cap_within_bound", r.cap_within_bound},
          {"cap_within_3nwn", r.cap_within_limit},
          {"u_at_s_k", r.u_at_s_k},
          {"interior_condition", r.interior_condition},
          {"solver", {{"alpha", r.solver_alpha}, {"cap", r.solver_cap}}},
          {"mollified",
           {{"alpha", r.mollified_alpha},
            {"drop", r.mollified_drop},
            {"cap", r.mollified_cap},
            {"cap_bound", r.mollified_cap_bound},
            {"cap_within_bound", r.mollified_cap_within_bound},
            {"u_at_s_k", r.mollified_u_at_s_k},
            {"interior_condition", r.mollified_interior_condition}}}};
}

}  // namespace mincap
