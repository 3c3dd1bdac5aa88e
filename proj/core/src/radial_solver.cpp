#include "mincap/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "mincap/error.hpp"
#include "radial_layer.hpp"

namespace mincap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// q / sqrt(W^2 - q^2), written so that W close to q keeps full precision and
// W = inf (or overflowing W^2) yields 0.
double slope_from_weight(double W, double q) {
  if (q == 0) return 0.0;
  if (!(W > q)) return kInf;
  const double s = std::sqrt((W - q) * (W + q));
  return q / s;
}

// (sqrt(1 + u'^2) - 1) W = q^2 W / (S (W + S)) with S = sqrt(W^2 - q^2).
double area_density(double W, double q) {
  if (q == 0 || std::isinf(W)) return 0.0;
  if (!(W > q)) return kInf;
  const double S = std::sqrt((W - q) * (W + q));
  if (std::isinf(S)) return 0.5 * q * (q / W);
  return q * q * W / (S * (W + S));
}

double finite_drop(const WarpedManifold& m, double a, double b, double q, double rel_tol) {
  if (q == 0 || !(b > a)) return 0.0;
  return detail::integrate_touching(
      m, a, b, q, [q](double W) { return slope_from_weight(W, q); },
      [q](double y0, double y1) { return detail::slope_layer(q, y0, y1); }, rel_tol);
}

double finite_area(const WarpedManifold& m, double a, double b, double q, double rel_tol) {
  if (q == 0 || !(b > a)) return 0.0;
  return m.unit_sphere_area() *
         detail::integrate_touching(
             m, a, b, q, [q](double W) { return area_density(W, q); },
             [q](double y0, double y1) { return detail::area_layer(q, y0, y1); }, rel_tol);
}

double tail_integral(const std::function<double(double, double)>& piece, double r0, const RadialOptions& opts,
                     const char* what) {
  const IntegralCertificate cert = quad::certify_tail(piece, r0, opts.tail);
  if (cert.verdict == Verdict::Convergent) return cert.value + cert.tail_bound;
  if (cert.verdict == Verdict::Divergent) return kInf;
  throw ConvergenceError(std::string("tail of the ") + what + " integral is undetermined", cert.tail_bound,
                         static_cast<int>(cert.radii.size()));
}

void check_annulus(const WarpedManifold& m, double r_a, double r_b) {
  if (!(r_b > r_a)) throw InputError("annulus needs r_b > r_a");
  if (r_a < m.r_min()) throw InputError("inner radius lies outside the manifold");
  if (std::isfinite(r_b) && r_b > m.r_max()) throw InputError("outer radius lies outside the manifold");
}

// Infimum of the weight on the closed annulus; for r_b = inf the scan stops at
// 1e8 r_a (or the domain end).
WarpedManifold::Minimum annulus_infimum(const WarpedManifold& m, double r_a, double r_b) {
  double hi = r_b;
  if (!std::isfinite(hi)) hi = std::min(m.r_max(), std::max(r_a, 1.0) * 1e8);
  return m.weight_infimum(r_a, hi);
}

std::vector<double> profile_grid(const WarpedManifold& m, double r_a, double r_b, const RadialOptions& opts) {
  double hi = r_b;
  if (!std::isfinite(hi)) hi = opts.grid_outer > r_a ? opts.grid_outer : 64.0 * std::max(r_a, 1.0);
  hi = std::min(hi, m.r_max());
  const int count = std::max(opts.grid_points, 2);
  return log_grid(r_a, hi, 0, count);
}

}  // namespace

double minimal_slope(const WarpedManifold& m, double r, double q) {
  if (q < 0) throw InputError("flux constant must be nonnegative");
  const double W = m.weight(r);
  if (q == 0) return 0.0;
  if (!(q < W)) throw SingularInputError("flux constant reaches the weight w^{n-1} at r = " + std::to_string(r));
  return slope_from_weight(W, q);
}

double integrate_drop(const WarpedManifold& m, double r_a, double r_b, double q, const RadialOptions& opts) {
  check_annulus(m, r_a, r_b);
  if (q < 0) throw InputError("flux constant must be nonnegative");
  if (q == 0) return 0.0;
  const auto inf = annulus_infimum(m, r_a, r_b);
  if (q > inf.value * (1 + 4 * std::numeric_limits<double>::epsilon()))
    throw SingularInputError("flux constant exceeds the infimum of w^{n-1} on the annulus");
  if (q >= inf.value) {
    // touching: integrable only at an isolated endpoint with nonzero slope of W
    const double hi = std::isfinite(r_b) ? r_b : std::max(2.0 * r_a, r_a + 1.0);
    const double span = hi - r_a;
    const double probe = 1e-6 * span;
    auto touches = [&](double r) { return m.weight(r) <= q; };
    const bool at_inner = inf.location == r_a;
    const bool at_outer = std::isfinite(r_b) && inf.location == r_b;
    if (!at_inner && !at_outer) return kInf;
    if ((at_inner && touches(r_a + probe)) || (at_outer && touches(r_b - probe)))
      throw NonIntegrableError("flux constant equals w^{n-1} on an interval");
  }
  if (std::isfinite(r_b)) return finite_drop(m, r_a, r_b, q, opts.rel_tol);
  const double r0 = std::max(r_a, 1.0);
  const double head = finite_drop(m, r_a, r0, q, opts.rel_tol);
  return head + tail_integral([&](double a, double b) { return finite_drop(m, a, b, q, opts.rel_tol); }, r0, opts,
                              "drop");
}

double interior_area(const WarpedManifold& m, double r_a, double r_b, double q, const RadialOptions& opts) {
  check_annulus(m, r_a, r_b);
  if (q == 0) return 0.0;
  if (std::isfinite(r_b)) return finite_area(m, r_a, r_b, q, opts.rel_tol);
  const double r0 = std::max(r_a, 1.0);
  const double head = finite_area(m, r_a, r0, q, opts.rel_tol);
  return head + tail_integral([&](double a, double b) { return finite_area(m, a, b, q, opts.rel_tol); }, r0, opts,
                              "area");
}

RadialProfile shoot_for_drop(const WarpedManifold& m, double r_a, double r_b, double t, const RadialOptions& opts) {
  check_annulus(m, r_a, r_b);
  if (!(t >= 0) || !std::isfinite(t)) throw InputError("target gap t must be finite and nonnegative");

  RadialProfile p;
  p.r_inner = r_a;
  p.r_outer = r_b;
  p.t = t;
  p.grid = profile_grid(m, r_a, r_b, opts);

  if (t > 0) {
    const auto inf = annulus_infimum(m, r_a, r_b);
    const double q_max = inf.value;
    if (!(q_max > 0)) throw DegenerateGeometryError("w^{n-1} vanishes on the annulus; no admissible flux");
    // a flux touching w^{n-1} on an interval has unbounded drop
    auto drop = [&](double q) {
      try {
        return integrate_drop(m, r_a, r_b, q, opts);
      } catch (const NonIntegrableError&) {
        return kInf;
      }
    };

    // Largest flux with a finite drop at least t, or q_max if none.
    double q_hi = q_max;
    double d_hi = drop(q_max);
    if (!(d_hi >= t)) {
      d_hi = -1;
    } else if (std::isinf(d_hi)) {
      d_hi = -1;
      for (int k = 1; k <= 15; ++k) {
        const double q = q_max * (1 - std::pow(10.0, -k));
        const double d = drop(q);
        if (d >= t) {
          q_hi = q;
          d_hi = d;
          break;
        }
      }
    }

    struct Candidate {
      double q;
      double drop;
      bool attached;
    };
    std::vector<Candidate> candidates;
    if (d_hi >= t) {
      auto g = [&](double q) { return drop(q) - t; };
      std::uintmax_t iters = 200;
      const auto tol = [&](double a, double b) {
        return std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
      };
      double q_star;
      if (d_hi == t) {
        q_star = q_hi;
      } else {
        const auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, q_hi, -t, d_hi - t, tol, iters);
        const double glo = std::abs(g(lo));
        const double ghi = std::abs(g(hi));
        q_star = glo <= ghi ? lo : hi;
      }
      p.root_iterations = static_cast<int>(iters);
      candidates.push_back({q_star, drop(q_star), true});
    }
    // Detached candidates: jumps absorb whatever drop the flux cannot supply.
    const double W_a = m.weight(r_a);
    const double W_b = std::isfinite(r_b) ? m.weight(r_b) : kInf;
    for (double q : {W_a, W_b, q_max}) {
      if (!(q <= q_max) || !std::isfinite(q)) continue;
      const double d = drop(q);
      if (std::isfinite(d) && d <= t) candidates.push_back({q, d, false});
    }
    if (candidates.empty()) throw DegenerateGeometryError("no admissible flux constant for the radial problem");

    const double A_a = m.sphere_area(r_a);
    const double A_b = std::isfinite(r_b) ? m.sphere_area(r_b) : kInf;
    double best = kInf;
    for (const Candidate& c : candidates) {
      const double residual = c.attached ? 0.0 : t - c.drop;
      const double J = interior_area(m, r_a, r_b, c.q, opts) + residual * std::min(A_a, A_b);
      if (J < best) {
        best = J;
        p.flux_q = c.q;
        p.drop = c.attached ? t : c.drop;
        p.attached = c.attached || residual == 0;
        p.jump_inner = A_a <= A_b ? residual : 0.0;
        p.jump_outer = A_a <= A_b ? 0.0 : residual;
      }
    }
  }

  // Nodal values by cumulative cell quadrature from the inner trace.
  const std::size_t N = p.grid.size();
  p.values.assign(N, 0.0);
  p.slopes.assign(N, 0.0);
  const double top = t - p.jump_inner;
  double acc = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) acc += finite_drop(m, p.grid[i - 1], p.grid[i], p.flux_q, opts.rel_tol);
    p.values[i] = top - acc;
    p.slopes[i] = -slope_from_weight(m.weight(p.grid[i]), p.flux_q);
  }
  // pin the outer trace exactly; the cumulative sum differs only by quadrature noise
  if (std::isfinite(r_b)) p.values.back() = p.jump_outer;
  return p;
}

double profile_value(const WarpedManifold& m, const RadialProfile& p, double r, const RadialOptions& opts) {
  if (r < p.r_inner || r > p.r_outer) throw InputError("radius outside the profile's annulus");
  if (r == p.r_inner) return p.t - p.jump_inner;
  if (p.flux_q == 0) return p.t - p.jump_inner;
  if (std::isfinite(p.r_outer)) return p.t - p.jump_inner - integrate_drop(m, p.r_inner, r, p.flux_q, opts);
  return p.jump_outer + integrate_drop(m, r, p.r_outer, p.flux_q, opts);
}

ProfileObjective profile_objective(const WarpedManifold& m, const RadialProfile& p, const RadialOptions& opts) {
  ProfileObjective o;
  o.interior = interior_area(m, p.r_inner, p.r_outer, p.flux_q, opts);
  o.trace_inner = p.jump_inner > 0 ? m.sphere_area(p.r_inner) * p.jump_inner : 0.0;
  o.trace_outer = p.jump_outer > 0 ? m.sphere_area(p.r_outer) * p.jump_outer : 0.0;
  return o;
}

HarmonicProfile radial_harmonic(const WarpedManifold& m, double r_a, double r_b, int grid_points) {
  check_annulus(m, r_a, r_b);
  HarmonicProfile h;
  h.r_inner = r_a;
  h.r_outer = r_b;
  const double p = -static_cast<double>(m.kappa());
  if (std::isfinite(r_b)) {
    if (!(r_a > 0) && m.closure() == Closure::SmoothPole)
      throw InputError("normalizer diverges at the pole; use r_a > 0");
    const double v = m.integrate_power(p, r_a, r_b);
    if (!std::isfinite(v) || !(v > 0)) throw InputError("normalizing integral of w^{-kappa} is not finite");
    h.normalizer.value = v;
    h.normalizer.verdict = Verdict::Convergent;
    h.normalizer.tail_bound = 0;
    h.normalizer.r_cut = r_b;
  } else {
    h.normalizer = m.improper_integral(p, r_a);
    if (h.normalizer.verdict == Verdict::Divergent) h.parabolic_signal = true;
  }
  h.c = h.parabolic_signal ? 0.0 : 1.0 / h.normalizer.value;

  RadialOptions go;
  go.grid_points = grid_points;
  h.grid = profile_grid(m, r_a, r_b, go);
  h.values.assign(h.grid.size(), 1.0);
  if (h.c > 0) {
    double acc = 0;
    for (std::size_t i = 1; i < h.grid.size(); ++i) {
      acc += m.integrate_power(p, h.grid[i - 1], h.grid[i]);
      h.values[i] = 1.0 - h.c * acc;
    }
    if (std::isfinite(r_b)) h.values.back() = 0.0;
  }
  return h;
}

Barrier::Barrier(double epsilon, double Lambda, double tau) : epsilon_(epsilon), Lambda_(Lambda), tau_(tau) {
  if (!(epsilon > 0) || !(Lambda > 0) || !(tau > 0)) throw InputError("barrier needs epsilon, Lambda, tau > 0");
  lambda_eps_ = -std::expm1(-Lambda * tau) / (Lambda * std::sqrt(1 + 1 / (epsilon * epsilon)));
}

// With A = 1 + eps^-2 and v(s) = sqrt(A e^{2 Lambda s} - 1), the integrand is
// 1/v and the substitution v -> s gives phi = (atan v(s) - atan v(0)) / Lambda.
double Barrier::value(double s) const {
  if (s < 0) throw InputError("barrier argument must be nonnegative");
  const double A = 1 + 1 / (epsilon_ * epsilon_);
  const double v0 = 1 / epsilon_;
  const double v = std::sqrt(A * std::expm1(2 * Lambda_ * s) + v0 * v0);
  return std::atan((v - v0) / (1 + v * v0)) / Lambda_;
}

double Barrier::derivative(double s) const {
  const double A = 1 + 1 / (epsilon_ * epsilon_);
  const double v0 = 1 / epsilon_;
  return 1 / std::sqrt(A * std::expm1(2 * Lambda_ * s) + v0 * v0);
}

double Barrier::second_derivative(double s) const {
  const double A = 1 + 1 / (epsilon_ * epsilon_);
  const double v0 = 1 / epsilon_;
  const double v2 = A * std::expm1(2 * Lambda_ * s) + v0 * v0;
  return -Lambda_ * (v2 + 1) / (v2 * std::sqrt(v2));
}

double exponential_drop(double lambda, double r_a, double r_b, double T) {
  if (!(lambda > 0)) throw InputError("lambda must be positive");
  if (T < r_b) throw InputError("flux level T must be at least r_b");
  // acos e^{-x} = atan sqrt(e^{2x} - 1), accurate for small x
  auto arc = [lambda](double x) { return std::atan(std::sqrt(std::expm1(2 * lambda * x))); };
  return (arc(T - r_a) - arc(T - r_b)) / lambda;
}

double oscillation_sup(double lambda, double r_a, double r_b, double T_span) {
  if (!(lambda > 0)) throw InputError("lambda must be positive");
  if (r_b < r_a) throw InputError("oscillation needs r_b >= r_a");
  if (r_b == r_a) return 0.0;
  const double lo = r_b;
  const double hi = r_b + std::max(T_span, 0.0);
  auto f = [&](double T) { return exponential_drop(lambda, r_a, r_b, T); };
  double best = std::max(f(lo), f(hi));
  if (hi > lo) {
    const auto [x, fx] = boost::math::tools::brent_find_minima([&](double T) { return -f(T); }, lo, hi, 52);
    (void)x;
    best = std::max(best, -fx);
  }
  return best;
}

nlohmann::json to_json(const RadialProfile& p) {
  nlohmann::json j;
  j["r_inner"] = p.r_inner;
  j["r_outer"] = std::isfinite(p.r_outer) ? nlohmann::json(p.r_outer) : nlohmann::json("inf");
  j["t"] = p.t;
  j["flux_q"] = p.flux_q;
  j["jump_inner"] = p.jump_inner;
  j["jump_outer"] = p.jump_outer;
  j["interior_drop"] = p.drop;
  j["attached"] = p.attached;
  j["monotone"] = "nonincreasing";
  j["grid_points"] = p.grid.size();
  return j;
}


namespace detail {

double slope_layer(double q, double y0, double y1) {
  // integral of q / sqrt(y (y + 2q)) is 2 q asinh(sqrt(y / 2q))
  auto F = [q](double y) { return 2 * q * std::asinh(std::sqrt(y / (2 * q))); };
  return F(y1) - F(y0);
}

double area_layer(double q, double y0, double y1) {
  // with z = q + y: integral of z^2 / sqrt(z^2 - q^2) is (z sqrt(z^2 - q^2) + q^2 acosh(z / q)) / 2
  auto F = [q](double y) {
    const double z = q + y;
    return 0.5 * (z * std::sqrt(y * (y + 2 * q)) + 2 * q * q * std::asinh(std::sqrt(y / (2 * q))));
  };
  return F(y1) - F(y0) - 0.5 * (y1 - y0) * (2 * q + y0 + y1);
}

double integrate_touching(const WarpedManifold& m, double a, double b, double q,
                          const std::function<double(double)>& phi,
                          const std::function<double(double, double)>& layer, double rel_tol) {
  std::vector<double> breaks = m.breakpoints(a, b);
  double total = 0;
  // end = a with direction +1, or b with direction -1
  auto peel = [&](double end, double inner, double dir) {
    const double We = m.weight(end);
    const double g0 = We - q;
    if (!(g0 >= 0) || g0 > 1e-6 * We) return end;
    const double len = std::abs(inner - end);
    const double h = 1e-6 * len;
    // second-order one-sided derivative of W into the interval
    const double D = (-3 * We + 4 * m.weight(end + dir * h) - m.weight(end + 2 * dir * h)) / (2 * h);
    if (!(D > 0)) return end;
    const double delta = 1e-9 * len;
    total += layer(g0, g0 + D * delta) / D;
    return end + dir * delta;
  };
  if (breaks.size() >= 2) {
    breaks.front() = peel(breaks.front(), breaks[1], 1.0);
    breaks.back() = peel(breaks.back(), breaks[breaks.size() - 2], -1.0);
  }
  auto f = [&m, &phi](double r) { return phi(m.weight(r)); };
  return total + quad::piecewise(f, breaks, quad::Rule::SqrtSubstituted, rel_tol);
}

}  // namespace detail

}  // namespace mincap
