#include "mincap/estimates.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "mincap/capacity.hpp"
#include "mincap/error.hpp"
#include "radial_layer.hpp"

namespace mincap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of s / V(s) over [a, b] given V(a). V is tracked on log cells and
// interpolated by cubic Hermite with the exact derivative V' = sphere_area.
double phi_piece(const WarpedManifold& m, double a, double b, double V_a, double* V_b) {
  std::vector<double> nodes = m.breakpoints(a, b);
  const std::vector<double> cells = log_grid(a, b, 0, 33);
  nodes.insert(nodes.end(), cells.begin(), cells.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  auto area = [&m](double s) { return m.sphere_area(s); };
  double V0 = V_a;
  double total = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double x0 = nodes[i];
    const double x1 = nodes[i + 1];
    const double h = x1 - x0;
    const double V1 = V0 + quad::gauss_kronrod(area, x0, x1, 1e-12);
    const double d0 = area(x0);
    const double d1 = area(x1);
    auto V = [&](double s) {
      const double u = (s - x0) / h;
      const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
      const double h10 = u * (1 - u) * (1 - u);
      const double h01 = u * u * (3 - 2 * u);
      const double h11 = u * u * (u - 1);
      return h00 * V0 + h10 * h * d0 + h01 * V1 + h11 * h * d1;
    };
    total += quad::gauss_kronrod([&](double s) { return s / V(s); }, x0, x1, 1e-11);
    V0 = V1;
  }
  if (V_b) *V_b = V0;
  return total;
}


}  // namespace

IntegralCertificate phi_integral(const WarpedManifold& m, double r, const quad::TailOptions& options) {
  if (m.closure() != Closure::SmoothPole) throw UnsupportedError("Phi needs a smooth pole");
  if (!(r > 0)) throw InputError("Phi needs r > 0");
  double carried_r = r;
  double carried_V = m.ball_volume(r);
  auto piece = [&](double a, double b) {
    const double V_a = a == carried_r ? carried_V : m.ball_volume(a);
    double V_b = 0;
    const double p = phi_piece(m, a, b, V_a, &V_b);
    carried_r = b;
    carried_V = V_b;
    return p;
  };
  quad::TailOptions opts = options;
  opts.r_max = std::min(opts.r_max, m.r_max());
  return quad::certify_tail(piece, r, opts);
}

IntegralCertificate phi_integral(const std::function<double(double)>& volume, double r,
                                 const quad::TailOptions& options) {
  if (!(r > 0)) throw InputError("Phi needs r > 0");
  auto piece = [&](double a, double b) {
    return quad::gauss_kronrod([&](double s) { return s / volume(s); }, a, b, 1e-12);
  };
  return quad::certify_tail(piece, r, options);
}

FluxReport flux_from_profile(const WarpedManifold& m, const RadialProfile& p, const RadialOptions& opts) {
  FluxReport f;
  f.t = p.t;
  f.norm = m.unit_sphere_area() * p.flux_q;
  f.cap_t = profile_objective(m, p, opts).total();
  if (p.t > 0) {
    f.lower = f.cap_t / p.t;
    f.upper = 2 * f.cap_t / p.t;
    constexpr double rel = 1e-9;
    f.window_holds = f.norm >= f.lower * (1 - rel) && f.norm <= f.upper * (1 + rel);
    f.margin = f.upper > 0 ? std::min(f.norm - f.lower, f.upper - f.norm) / f.upper : 0.0;
  }
  return f;
}

double slice_integral(const WarpedManifold& m, const RadialProfile& p, double lambda, const RadialOptions& opts) {
  if (!(lambda >= 0)) throw InputError("slice level must be nonnegative");
  const double top = p.t - p.jump_inner;  // u(r_a+)
  const double bottom = p.jump_outer;     // u(r_b-)
  double total = 0;

  // vertical walls: the integrand tends to w^{n-1} times the height inside {u < lambda}
  if (p.jump_outer > 0 && std::isfinite(p.r_outer))
    total += m.sphere_area(p.r_outer) * std::clamp(lambda, 0.0, p.jump_outer);
  if (p.jump_inner > 0) total += m.sphere_area(p.r_inner) * std::clamp(lambda - top, 0.0, p.jump_inner);

  if (lambda <= bottom || p.flux_q == 0) return total;
  double r_lambda = p.r_inner;
  if (lambda < top) {
    auto g = [&](double r) { return profile_value(m, p, r, opts) - lambda; };
    const double hi_r = std::isfinite(p.r_outer) ? p.r_outer : p.grid.back();
    double lo = p.r_inner;
    double hi = hi_r;
    if (!std::isfinite(p.r_outer)) {
      while (g(hi) > 0) hi *= 2;
    }
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        g, lo, hi, top - lambda, g(hi), boost::math::tools::eps_tolerance<double>(50), iters);
    r_lambda = 0.5 * (a + b);
  }
  // u'^2 W / sqrt(1 + u'^2) on (r_lambda, r_b)
  const double q = p.flux_q;
  auto integrand = [q](double W) {
    if (!(W > q)) return kInf;
    const double s = q / std::sqrt((W - q) * (W + q));
    if (s == 0) return 0.0;
    return s * s * W / std::sqrt(1 + s * s);
  };
  // in the layer the integrand is q^2 / sqrt(y (y + 2q)), q times the slope
  auto layer = [q](double y0, double y1) { return q * detail::slope_layer(q, y0, y1); };
  auto piece = [&](double a, double b) { return detail::integrate_touching(m, a, b, q, integrand, layer, opts.rel_tol); };
  double interior;
  if (std::isfinite(p.r_outer)) {
    interior = piece(r_lambda, p.r_outer);
  } else {
    const double r0 = std::max(r_lambda, 1.0);
    const IntegralCertificate c = quad::certify_tail(piece, r0, opts.tail);
    interior = piece(r_lambda, r0) + c.value + (std::isfinite(c.tail_bound) ? c.tail_bound : 0.0);
  }
  return total + m.unit_sphere_area() * interior;
}

AsymptoticAudit asymptotic_audit(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                 const Classification& classification) {
  if (classification.parabolicity != Parabolicity::Nonparabolic ||
      classification.m_parabolicity != MParabolicity::MNonparabolic)
    throw PreconditionError("asymptotic audit needs a nonparabolic, M-nonparabolic manifold");
  if (!(t > 0)) throw InputError("t must be positive");
  for (double R : R_list)
    if (R < std::max(t, 2 * r_a)) throw InputError("audit radii must be at least max(t, 2 r_a)");
  AsymptoticAudit a;
  a.t = t;
  a.r_a = r_a;
  RadialOptions opts;
  opts.grid_points = 2;
  RadialProfile p;
  a.cap_t = minimal_capacity(m, r_a, kInf, t, opts, &p).value;
  double lo = kInf, hi = 0;
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    const double R = R_list[i];
    const double u = profile_value(m, p, R, opts);
    const IntegralCertificate phi = phi_integral(m, R);
    const double ratio = u * t / (a.cap_t * phi.value);
    a.radii.push_back(R);
    a.u_values.push_back(u);
    a.phi_values.push_back(phi.value);
    a.ratios.push_back(ratio);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (i + 1 == (R_list.size() + 1) / 2) a.theta_star_half = std::max(hi, 1 / lo);
  }
  a.theta_star = std::max(hi, 1 / lo);
  a.spread = hi / lo - 1;
  a.stable = std::abs(a.theta_star / a.theta_star_half - 1) < 0.1;
  return a;
}

AsymptoticAudit asymptotic_audit(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list) {
  return asymptotic_audit(m, r_a, t, R_list, classify(m));
}

nlohmann::json to_json(const AsymptoticAudit& a) {
  return {{"t", a.t},
          {"r_a", a.r_a},
          {"cap_t", a.cap_t},
          {"radii", a.radii},
          {"u", a.u_values},
          {"phi", a.phi_values},
          {"ratios", a.ratios},
          {"theta_star", a.theta_star},
          {"spread", a.spread},
          {"stable", a.stable}};
}

SandwichAudit capacity_sandwich_audit(const WarpedManifold& m, const std::vector<double>& r_list, double t,
                                      const Classification& classification) {
  if (classification.parabolicity != Parabolicity::Nonparabolic ||
      classification.m_parabolicity != MParabolicity::MNonparabolic)
    throw PreconditionError("sandwich audit needs a nonparabolic, M-nonparabolic manifold");
  if (!(t > 0)) throw InputError("t must be positive");
  SandwichAudit s;
  s.t = t;
  RadialOptions opts;
  opts.grid_points = 2;
  const WarpedManifold geometric = m.with_kappa(m.dimension() - 1);
  double lo = kInf, hi = 0;
  for (double r : r_list) {
    if (r < t) throw PreconditionError("sandwich audit needs r >= t");
    SandwichRow row;
    row.r = r;
    row.cap_t = minimal_capacity(m, r, kInf, t, opts).value;
    row.phi = phi_integral(m, r).value;
    row.ratio = (t * t / row.cap_t) / row.phi;
    row.R = 4 * r;
    row.cap_t_annulus = minimal_capacity(m, r, row.R, t, opts).value;
    row.cap_annulus = classical_capacity(geometric, r, row.R).value;
    row.cap_shifted = classical_capacity(geometric, r / 2, row.R + r / 2).value;
    row.upper_bound = 0.5 * t * t * row.cap_annulus;
    row.upper_holds = row.cap_t_annulus <= row.upper_bound * (1 + 1e-6);
    row.beta = t * t * row.cap_shifted / row.cap_t_annulus;
    row.quadratic_ratio = row.cap_t_annulus / row.upper_bound;
    s.upper_holds = s.upper_holds && row.upper_holds;
    s.beta_star = std::max(s.beta_star, row.beta);
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    s.rows.push_back(row);
  }
  s.vartheta_star = s.rows.empty() ? 1.0 : std::max(hi, 1 / lo);
  s.stable = !s.rows.empty() && hi / lo < 1.2;
  return s;
}

SandwichAudit capacity_sandwich_audit(const WarpedManifold& m, const std::vector<double>& r_list, double t) {
  return capacity_sandwich_audit(m, r_list, t, classify(m));
}

nlohmann::json to_json(const SandwichAudit& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SandwichRow& r : a.rows)
    rows.push_back({{"r", r.r},
                    {"cap_t", r.cap_t},
                    {"phi", r.phi},
                    {"ratio", r.ratio},
                    {"R", r.R},
                    {"cap_t_annulus", r.cap_t_annulus},
                    {"cap_annulus", r.cap_annulus},
                    {"cap_shifted", r.cap_shifted},
                    {"upper_bound", r.upper_bound},
                    {"upper_holds", r.upper_holds},
                    {"beta", r.beta},
                    {"quadratic_ratio", r.quadratic_ratio}});
  return {{"t", a.t},
          {"rows", rows},
          {"vartheta_star", a.vartheta_star},
          {"beta_star", a.beta_star},
          {"upper_holds", a.upper_holds},
          {"stable", a.stable}};
}

}  // namespace mincap
