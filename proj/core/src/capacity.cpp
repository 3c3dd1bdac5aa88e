#include "mincap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mincap/error.hpp"

namespace mincap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json finite_or_tag(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

// sqrt(1 + s^2) - 1 without cancellation for small s.
double relaxed_area(double s) { return s * s / (std::sqrt(1 + s * s) + 1); }

// Solves the symmetric tridiagonal system (diag, off) x = rhs in place.
void thomas_solve(std::vector<double>& diag, std::vector<double>& off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

std::string to_string(CapacityMethod m) {
  switch (m) {
    case CapacityMethod::ClosedForm: return "closed_form";
    case CapacityMethod::Shooting: return "shooting";
    case CapacityMethod::Discrete: return "discrete";
    case CapacityMethod::Exhaustion: return "exhaustion";
  }
  return "closed_form";
}

nlohmann::json to_json(const CapacityResult& r) {
  nlohmann::json j;
  j["value"] = r.value;
  j["t"] = r.t ? nlohmann::json(*r.t) : nlohmann::json(nullptr);
  j["inner_r"] = r.inner_r;
  j["outer_r"] = finite_or_tag(r.outer_r);
  j["method"] = to_string(r.method);
  j["interior_area"] = r.interior_area;
  j["trace_inner"] = r.trace_inner;
  j["trace_outer"] = r.trace_outer;
  j["parabolic"] = r.parabolic;
  if (!r.sequence_radii.empty()) {
    nlohmann::json radii = nlohmann::json::array();
    for (double x : r.sequence_radii) radii.push_back(finite_or_tag(x));
    j["sequence_radii"] = radii;
    j["sequence_values"] = r.sequence_values;
    j["tail_estimate"] = r.tail_estimate;
    j["m_parabolic_suspect"] = r.m_parabolic_suspect;
  }
  j["diagnostics"] = {{"iterations", r.diagnostics.iterations},
                      {"residual", r.diagnostics.residual},
                      {"converged", r.diagnostics.converged},
                      {"note", r.diagnostics.note}};
  return j;
}

CapacityResult classical_capacity(const WarpedManifold& m, double r_a, double r_b) {
  if (!(r_b > r_a)) throw InputError("annulus needs r_b > r_a");
  if (r_a < m.r_min()) throw InputError("inner radius lies outside the manifold");
  if (m.closure() == Closure::SmoothPole && !(r_a > 0))
    throw InputError("harmonic normalizer diverges at the pole; use r_a > 0");
  CapacityResult res;
  res.inner_r = r_a;
  res.outer_r = r_b;
  res.method = CapacityMethod::ClosedForm;
  const int n = m.dimension();
  const double kappa = m.kappa();
  const double p_norm = -kappa;
  const double p_energy = n - 1 - 2 * kappa;

  double N, E;
  if (std::isfinite(r_b)) {
    N = m.integrate_power(p_norm, r_a, r_b);
    if (!std::isfinite(N) || !(N > 0)) throw InputError("normalizing integral of w^{-kappa} is not finite");
    E = p_energy == p_norm ? N : m.integrate_power(p_energy, r_a, r_b);
  } else {
    const IntegralCertificate cn = m.improper_integral(p_norm, r_a);
    if (cn.verdict == Verdict::Divergent) {
      res.parabolic = true;
      res.diagnostics.note = "normalizer diverges: parabolic end";
      return res;
    }
    N = cn.value;
    res.diagnostics.residual = cn.tail_bound;
    if (cn.verdict == Verdict::Undetermined) {
      res.diagnostics.converged = false;
      res.diagnostics.note = "normalizer tail undetermined at r_max";
    }
    if (p_energy == p_norm) {
      E = N;
    } else {
      const IntegralCertificate ce = m.improper_integral(p_energy, r_a);
      if (ce.verdict != Verdict::Convergent) {
        res.diagnostics.converged = false;
        res.diagnostics.note = "energy integral not certified convergent";
      }
      E = ce.value;
    }
  }
  const double c = 1.0 / N;
  res.value = m.unit_sphere_area() * c * c * E;
  res.interior_area = res.value;
  return res;
}

CapacityResult minimal_capacity(const WarpedManifold& m, double r_a, double r_b, double t, const RadialOptions& opts,
                                RadialProfile* profile) {
  if (!(t >= 0)) throw InputError("t must be nonnegative");
  CapacityResult res;
  res.t = t;
  res.inner_r = r_a;
  res.outer_r = r_b;
  res.method = CapacityMethod::Shooting;
  RadialProfile p = shoot_for_drop(m, r_a, r_b, t, opts);
  const ProfileObjective obj = profile_objective(m, p, opts);
  res.interior_area = obj.interior;
  res.trace_inner = obj.trace_inner;
  res.trace_outer = obj.trace_outer;
  res.value = obj.total();
  res.diagnostics.iterations = p.root_iterations;
  if (t > 0 && p.flux_q > 0 && p.attached) {
    res.diagnostics.residual = std::abs(integrate_drop(m, r_a, r_b, p.flux_q, opts) - t);
  }
  res.diagnostics.note = p.attached ? "attached" : "detached";
  if (profile) *profile = std::move(p);
  return res;
}

std::vector<double> make_grid(double r_a, double r_b, int cells) {
  if (cells < 1) throw InputError("grid needs at least one cell");
  if (!(r_b > r_a) || !std::isfinite(r_b)) throw InputError("grid needs finite r_b > r_a");
  return log_grid(r_a, r_b, 0, cells + 1);
}

DiscreteSolution discrete_minimize(const WarpedManifold& m, const std::vector<double>& grid, double t, bool relaxed,
                                   const DiscreteOptions& opts) {
  const std::size_t N = grid.size();
  if (N < 17) throw InputError("discrete minimizer needs at least 16 cells");
  for (std::size_t i = 1; i < N; ++i)
    if (!(grid[i] > grid[i - 1])) throw InputError("grid must be strictly increasing");
  if (!(t >= 0)) throw InputError("t must be nonnegative");
  if (grid.front() < m.r_min() || grid.back() > m.r_max()) throw InputError("grid leaves the manifold's domain");

  const std::size_t C = N - 1;
  const double area = m.unit_sphere_area();
  std::vector<double> dr(C), Wbar(C);
  for (std::size_t j = 0; j < C; ++j) {
    dr[j] = grid[j + 1] - grid[j];
    Wbar[j] = m.integrate_power(m.dimension() - 1, grid[j], grid[j + 1]) / dr[j];
  }
  const double A_a = m.sphere_area(grid.front());
  const double A_b = m.sphere_area(grid.back());

  std::vector<double> u(N);
  for (std::size_t i = 0; i < N; ++i) u[i] = t * (grid.back() - grid[i]) / (grid.back() - grid.front());

  auto interior = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t j = 0; j < C; ++j) s += relaxed_area((v[j + 1] - v[j]) / dr[j]) * Wbar[j] * dr[j];
    return area * s;
  };
  auto objective = [&](const std::vector<double>& v) {
    double J = interior(v);
    if (relaxed) J += A_a * (t - v.front()) + A_b * v.back();
    return J;
  };
  auto fixed = [&](std::size_t i) { return !relaxed && (i == 0 || i == N - 1); };

  std::vector<double> g(N), stiff(C), sigma(C);
  auto assemble = [&](const std::vector<double>& v) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t j = 0; j < C; ++j) {
      const double s = (v[j + 1] - v[j]) / dr[j];
      const double root = std::sqrt(1 + s * s);
      sigma[j] = s / root;
      stiff[j] = area * Wbar[j] / (root * root * root * dr[j]);
      const double flux = area * Wbar[j] * sigma[j];
      g[j] -= flux;
      g[j + 1] += flux;
    }
    if (relaxed) {
      g.front() -= A_a;
      g.back() += A_b;
    }
  };
  const double bound_tol = 1e-14 * std::max(t, 1e-300);
  auto projected_gradient_norm = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (fixed(i)) continue;
      double gi = g[i];
      if (v[i] <= bound_tol && gi > 0) gi = 0;
      if (v[i] >= t - bound_tol && gi < 0) gi = 0;
      s += gi * gi;
    }
    return std::sqrt(s);
  };
  auto project = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < N; ++i) {
      if (fixed(i)) continue;
      v[i] = std::clamp(v[i], 0.0, t);
    }
  };

  DiscreteSolution sol;
  SolverDiagnostics& diag = sol.result.diagnostics;
  double J = objective(u);
  diag.objective_history.push_back(J);
  bool converged = false;
  int it = 0;
  double pg = 0;
  std::vector<double> trial(N), d(N);
  for (; it < opts.max_iterations; ++it) {
    assemble(u);
    pg = projected_gradient_norm(u);
    if (pg < opts.gradient_tol * (1 + std::abs(J)) || t == 0) {
      converged = true;
      break;
    }
    // active set: nodes pinned at a bound with the gradient pushing outward
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < N; ++i) {
      if (fixed(i)) continue;
      if (u[i] <= bound_tol && g[i] > 0) continue;
      if (u[i] >= t - bound_tol && g[i] < 0) continue;
      free.push_back(i);
    }
    std::fill(d.begin(), d.end(), 0.0);
    if (!free.empty()) {
      const std::size_t F = free.size();
      std::vector<double> hd(F), ho(F > 1 ? F - 1 : 0), rhs(F);
      double scale = 0;
      for (std::size_t a = 0; a < F; ++a) {
        const std::size_t i = free[a];
        hd[a] = (i > 0 ? stiff[i - 1] : 0.0) + (i < C ? stiff[i] : 0.0);
        scale = std::max(scale, hd[a]);
        rhs[a] = -g[i];
        if (a + 1 < F) ho[a] = free[a + 1] == i + 1 ? -stiff[i] : 0.0;
      }
      const double mu = 1e-12 * std::max(scale, 1e-300);
      for (double& x : hd) x += mu;
      thomas_solve(hd, ho, rhs);
      for (std::size_t a = 0; a < F; ++a) d[free[a]] = rhs[a];
    }

    auto line_search = [&](const std::vector<double>& dir) {
      double step = 1.0;
      for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
        for (std::size_t i = 0; i < N; ++i) trial[i] = u[i] + step * dir[i];
        project(trial);
        double decrease = 0;
        for (std::size_t i = 0; i < N; ++i) decrease += g[i] * (trial[i] - u[i]);
        const double Jt = objective(trial);
        if (Jt < J && Jt <= J + 1e-4 * decrease) return Jt;
      }
      return kInf;
    };
    double Jt = line_search(d);
    if (!std::isfinite(Jt)) {
      // Newton direction failed; fall back to a diagonally scaled gradient step
      for (std::size_t i = 0; i < N; ++i) {
        const double h = (i > 0 ? stiff[i - 1] : 0.0) + (i < C ? stiff[i] : 0.0);
        d[i] = fixed(i) ? 0.0 : -g[i] / std::max(h, 1e-300);
      }
      Jt = line_search(d);
    }
    if (!std::isfinite(Jt)) {
      // no representable decrease left: accept if the gradient is already tiny
      if (pg < 1e-7 * (1 + std::abs(J))) {
        converged = true;
        diag.note = "stalled at rounding level";
        break;
      }
      throw ConvergenceError("discrete minimizer stagnated", pg, it);
    }
    u = trial;
    J = Jt;
    diag.objective_history.push_back(J);
  }
  if (!converged) throw ConvergenceError("discrete minimizer hit the iteration limit", pg, it);

  diag.iterations = it;
  diag.residual = pg;
  diag.converged = true;

  CapacityResult& res = sol.result;
  res.t = t;
  res.inner_r = grid.front();
  res.outer_r = grid.back();
  res.method = CapacityMethod::Discrete;
  res.interior_area = interior(u);
  res.trace_inner = relaxed ? A_a * (t - u.front()) : 0.0;
  res.trace_outer = relaxed ? A_b * u.back() : 0.0;
  res.value = res.interior_area + res.trace_inner + res.trace_outer;

  RadialProfile& p = sol.profile;
  p.r_inner = grid.front();
  p.r_outer = grid.back();
  p.t = t;
  p.grid = grid;
  p.values = u;
  p.slopes.assign(N, 0.0);
  double flux = 0;
  for (std::size_t j = 0; j < C; ++j) {
    const double s = (u[j + 1] - u[j]) / dr[j];
    p.slopes[j] = s;
    flux += -Wbar[j] * s / std::sqrt(1 + s * s);
  }
  p.slopes[N - 1] = p.slopes[N - 2];
  p.flux_q = std::max(0.0, flux / static_cast<double>(C));
  p.jump_inner = t - u.front();
  p.jump_outer = u.back();
  p.drop = u.front() - u.back();
  p.attached = p.jump_inner == 0 && p.jump_outer == 0;
  p.root_iterations = it;
  return sol;
}

CapacityResult capacity_exhaustion(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                   const ExhaustionOptions& opts) {
  if (R_list.empty()) throw InputError("exhaustion needs at least one outer radius");
  if (!(R_list.front() > r_a)) throw InputError("outer radii must exceed r_a");
  for (std::size_t i = 1; i < R_list.size(); ++i)
    if (!(R_list[i] > R_list[i - 1])) throw InputError("outer radii must increase");

  CapacityResult res;
  res.t = t;
  res.inner_r = r_a;
  res.outer_r = kInf;
  res.method = CapacityMethod::Exhaustion;
  CapacityResult last;
  for (double R : R_list) {
    last = minimal_capacity(m, r_a, R, t, opts.radial);
    res.sequence_radii.push_back(R);
    res.sequence_values.push_back(last.value);
  }
  res.value = last.value;
  res.interior_area = last.interior_area;
  res.trace_inner = last.trace_inner;
  res.trace_outer = last.trace_outer;

  const auto& v = res.sequence_values;
  const std::size_t K = v.size();
  bool monotone = true;
  for (std::size_t i = 1; i < K; ++i)
    if (v[i] > v[i - 1] * (1 + 1e-9) + 1e-300) monotone = false;
  if (K >= 3) {
    const double d1 = v[K - 2] - v[K - 1];
    const double d0 = v[K - 3] - v[K - 2];
    const double rho = d0 > 0 ? d1 / d0 : 0.0;
    res.tail_estimate = rho > 0 && rho < 1 ? d1 * rho / (1 - rho) : std::max(d1, 0.0);
  }
  bool cauchy = K >= 4;
  for (std::size_t i = K >= 3 ? K - 3 : 0; i < K && i > 0; ++i)
    if (std::abs(v[i] - v[i - 1]) > opts.convergence_rel * std::max(std::abs(v[i]), 1e-300)) cauchy = false;
  res.diagnostics.converged = cauchy;
  res.diagnostics.iterations = static_cast<int>(K);
  res.diagnostics.residual = res.tail_estimate;
  res.diagnostics.note = monotone ? "monotone nonincreasing" : "sequence not monotone";

  const double threshold =
      opts.suspect_threshold >= 0 ? opts.suspect_threshold : 1e-4 * t * m.sphere_area(r_a);
  res.m_parabolic_suspect = res.value < threshold;
  return res;
}

ScalingAudit scaling_audit(const WarpedManifold& m, double r_a, double r_b, double t, double T,
                           const RadialOptions& opts) {
  if (!(t > 0) || !(T >= t)) throw InputError("scaling audit needs 0 < t <= T");
  constexpr double slack = 1e-6;
  ScalingAudit a;
  a.t = t;
  a.T = T;
  a.cap_t = minimal_capacity(m, r_a, r_b, t, opts).value;
  a.cap_T = minimal_capacity(m, r_a, r_b, T, opts).value;
  a.cap = classical_capacity(m.with_kappa(m.dimension() - 1), r_a, r_b).value;
  const double ratio = T / t;
  a.linear_slack = a.cap_T - ratio * a.cap_t;
  a.quadratic_slack = ratio * ratio * a.cap_t - a.cap_T;
  a.dirichlet_slack = 0.5 * t * t * a.cap - a.cap_t;
  a.linear_ok = a.linear_slack >= -slack * a.cap_T;
  a.quadratic_ok = a.quadratic_slack >= -slack * a.cap_T;
  a.dirichlet_ok = a.dirichlet_slack >= -slack * a.cap_t;
  return a;
}

nlohmann::json to_json(const ScalingAudit& a) {
  return {{"t", a.t},
          {"T", a.T},
          {"cap_t", a.cap_t},
          {"cap_T", a.cap_T},
          {"cap", a.cap},
          {"linear", {{"holds", a.linear_ok}, {"slack", a.linear_slack}}},
          {"quadratic", {{"holds", a.quadratic_ok}, {"slack", a.quadratic_slack}}},
          {"dirichlet", {{"holds", a.dirichlet_ok}, {"slack", a.dirichlet_slack}}},
          {"passed", a.passed()}};
}

}  // namespace mincap
