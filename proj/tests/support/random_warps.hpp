#pragma once

// Seeded family of smooth positive warps with a smooth pole, and the
// inequality checks run over them.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "mincap/capacity.hpp"
#include "mincap/error.hpp"
#include "mincap/estimates.hpp"
#include "mincap/radial_solver.hpp"

namespace property {

struct RandomCase {
  int n = 2;
  std::string expression;
  double r_a = 1;
  double r_b = 4;
  std::vector<std::pair<double, double>> gaps;  // (t, T) with t < T
};

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

inline std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// w(r) = r (1 + a r^2)^p exp(b sin(c r) r^2 / (1 + r^2)).
inline RandomCase random_case(std::uint64_t seed) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ (seed * 0x2545f4914f6cdd1dULL));
  RandomCase c;
  c.n = 2 + static_cast<int>(rng() % 3);
  const double a = uniform(rng, 0.05, 1.0);
  const double p = uniform(rng, -0.3, 0.5);
  const double b = uniform(rng, -0.4, 0.4);
  const double k = uniform(rng, 0.5, 3.0);
  c.expression = "r*pow(1+" + number(a) + "*r*r," + number(p) + ")*exp(" + number(b) + "*sin(" + number(k) +
                 "*r)*r*r/(1+r*r))";
  c.r_a = uniform(rng, 0.3, 1.5);
  c.r_b = c.r_a * uniform(rng, 1.5, 8.0);
  for (int i = 0; i < 3; ++i) {
    const double t = uniform(rng, 0.02, 1.5);
    c.gaps.emplace_back(t, t * uniform(rng, 1.1, 4.0));
  }
  return c;
}

inline mincap::WarpedManifold manifold(const RandomCase& c) {
  return mincap::WarpedManifold(c.n, mincap::make_expression_warp(c.expression));
}

struct Violation {
  std::string what;
  double t = 0;
  double T = 0;
  double amount = 0;
};

/// Scaling and quadratic bounds, monotonicity in both radii, the flux window
/// and the slice identity; returns every violation found.
inline std::vector<Violation> check_case(const RandomCase& c) {
  using namespace mincap;
  std::vector<Violation> out;
  const auto m = manifold(c);
  constexpr double kMonotoneSlack = 1e-9;
  constexpr double kSliceTol = 1e-8;
  for (auto [t, T] : c.gaps) {
    const auto audit = scaling_audit(m, c.r_a, c.r_b, t, T);
    if (!audit.linear_ok) out.push_back({"linear scaling", t, T, audit.linear_slack});
    if (!audit.quadratic_ok) out.push_back({"quadratic scaling", t, T, audit.quadratic_slack});
    if (!audit.dirichlet_ok) out.push_back({"dirichlet bound", t, T, audit.dirichlet_slack});

    const double base = minimal_capacity(m, c.r_a, c.r_b, t).value;
    const double bigger_K = minimal_capacity(m, c.r_a * 1.1, c.r_b, t).value;
    const double bigger_Omega = minimal_capacity(m, c.r_a, c.r_b * 1.1, t).value;
    if (bigger_K < base * (1 - kMonotoneSlack)) out.push_back({"monotone in K", t, T, bigger_K - base});
    if (bigger_Omega > base * (1 + kMonotoneSlack)) out.push_back({"monotone in Omega", t, T, base - bigger_Omega});

    for (double gap : {t, T}) {
      const auto p = shoot_for_drop(m, c.r_a, c.r_b, gap);
      const auto flux = flux_from_profile(m, p);
      if (!flux.window_holds) out.push_back({"flux window", t, T, flux.margin});
      const double mu = m.unit_sphere_area() * p.flux_q;
      for (double lambda : {gap / 4, gap / 2, gap}) {
        const double diff = std::abs(slice_integral(m, p, lambda) - lambda * mu);
        if (diff > kSliceTol * std::max(1.0, lambda * mu)) out.push_back({"slice identity", t, T, diff});
      }
    }
  }
  return out;
}

}  // namespace property
