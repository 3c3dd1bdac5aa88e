// Acceptance gate: one PASS/FAIL line per criterion. `mincap_acceptance N`
// runs criterion N alone; without arguments every criterion runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mincap/mincap.hpp"
#include "oracles.hpp"
#include "random_warps.hpp"

using namespace mincap;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<void(Outcome&)> body;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1. E_k(alpha_k) = 2 to machine precision.
void staircase_exactness(Outcome& o) {
  double worst = 0;
  for (int k = 1; k <= 20; ++k) {
    const double e = staircase_E_k(k);
    worst = std::max(worst, std::abs(e - 2.0));
    o.require(std::abs(e - 2.0) <= 2 * std::numeric_limits<double>::epsilon() * 2.0,
              "E_k(alpha_k) != 2 at k=" + std::to_string(k));
  }
  o.detail << "max |E_k - 2| = " << worst << " over k=1..20";
}

// 2. I = 3 by bisection, capacity bound, interior condition.
void staircase_capacity(Outcome& o) {
  for (auto [i, k] : {std::pair{3, 10}, {4, 12}, {5, 14}}) {
    const auto r = staircase_reproduction(i, k, 2, true);
    const std::string tag = "(" + std::to_string(i) + "," + std::to_string(k) + ")";
    o.detail << tag << " I=" << r.I_at_alpha_ki << " cap=" << r.cap << "<=" << r.cap_bound
             << " u(s_k)=" << r.u_at_s_k << "; ";
    o.require(r.bracket_ok && std::abs(r.I_at_alpha_ki - 3.0) <= 1e-9, tag + " I != 3");
    o.require(r.cap <= r.cap_bound * (1 + 1e-6), tag + " capacity above bound");
    o.require(r.u_at_s_k > 2, tag + " interior condition u(s_k) > 2");
  }
}

// 3. Exponential warp: numeric drops match the closed form and stay under pi/(2 lambda).
void oscillation_bound(Outcome& o) {
  double worst_gap = 0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const WarpedManifold m(2, make_builtin_warp("exp", {{"lambda", lambda}, {"n", 2}}));
    const double bound = kPi / (2 * lambda);
    for (double r2 : {1.0, 2.0, 5.0}) {
      const double span = 50 / lambda;
      double numeric_max = 0;
      constexpr int kSteps = 200;
      for (int s = 0; s <= kSteps; ++s) {
        const double T = r2 + span * s / kSteps;
        const double numeric = integrate_drop(m, 0.0, r2, std::exp(-lambda * T));
        const double closed = static_cast<double>(oracle::exponential_drop(lambda, 0, r2, T));
        worst_gap = std::max(worst_gap, std::abs(numeric - closed));
        o.require(std::abs(numeric - closed) <= 1e-8, "drop disagrees with closed form");
        o.require(numeric <= bound + 1e-9, "drop above pi/(2 lambda)");
        numeric_max = std::max(numeric_max, numeric);
      }
      o.require(std::abs(numeric_max - oscillation_sup(lambda, 0, r2, span)) <= 1e-8, "maximized drop disagrees");
      // the minimizer for a large gap never drops more than the bound in the interior
      const auto p = shoot_for_drop(m, 0.0, r2, 10 * bound);
      o.require(p.drop <= bound + 1e-9, "profile drop above pi/(2 lambda)");
    }
  }
  o.detail << "max |numeric - closed form| = " << worst_gap;
}

// 4. Necked pole: (nonparabolic, m_parabolic) with certified tails and necks.
void necked_pole(Outcome& o) {
  const double r_check = 400 * kPi;
  for (int n : {2, 3}) {
    const auto m = build(ExampleSpec{"prop2_6", {{"n", n}}});
    const auto c = classify(m);
    const std::string tag = "n=" + std::to_string(n);
    o.require(c.parabolicity == Parabolicity::Nonparabolic, tag + " not nonparabolic");
    o.require(c.m_parabolicity == MParabolicity::MParabolic, tag + " not m_parabolic");
    for (const char* name : {"harmonic_normalizer", "classical_energy"}) {
      const Evidence* e = c.find(name);
      if (!e || !e->certificate || e->certificate->verdict != Verdict::Convergent) {
        o.require(false, tag + " " + name + " not convergent");
        continue;
      }
      const auto& cert = *e->certificate;
      std::size_t idx = 0;
      for (std::size_t j = 0; j < cert.radii.size(); ++j)
        if (cert.radii[j] <= r_check) idx = j;
      const double tail = cert.value - cert.partial_sums[idx] + cert.tail_bound;
      o.detail << tag << " " << name << " tail@400pi=" << tail << "; ";
      o.require(tail < 1e-4, tag + " " + name + " tail too large at 400 pi");
    }
    const Evidence* neck = c.find("neck_cutoff");
    if (!neck || neck->witness_values.size() < 3) {
      o.require(false, tag + " no neck cutoff sequence");
      continue;
    }
    bool decreasing = true;
    for (std::size_t j = 1; j < neck->witness_values.size(); ++j)
      decreasing = decreasing && neck->witness_values[j] < neck->witness_values[j - 1];
    o.detail << tag << " cutoff=" << neck->witness_values.back() << "; ";
    o.require(decreasing, tag + " cutoff sequence not decreasing");
    o.require(neck->witness_values.back() < 1e-3, tag + " cutoff not below 1e-3");
  }
}

// 5. Flat oracles and route agreement.
void flat_oracle(Outcome& o) {
  const auto plane = build(ExampleSpec{"flat", {{"n", 2}}});
  for (double R : {10.0, 100.0}) {
    const double cap = classical_capacity(plane, 1, R).value;
    o.require(rel(cap, 2 * kPi / std::log(R)) < 1e-3, "planar capacity");
    const double t = 0.5;
    const double shoot = minimal_capacity(plane, 1, R, t).value;
    const double disc = discrete_minimize(plane, make_grid(1, R, 2000), t, false).result.value;
    o.detail << "R=" << R << " cap=" << cap << " shooting=" << shoot << " discrete=" << disc << "; ";
    o.require(rel(shoot, disc) < 5e-3, "shooting vs discrete");
  }
  const auto space = build(ExampleSpec{"flat", {{"n", 3}}});
  const double cap3 = classical_capacity(space, 1, INFINITY).value;
  o.detail << "R^3 cap=" << cap3;
  o.require(rel(cap3, 4 * kPi) < 1e-3, "cap(B1) in R^3");
}

// 6. Inequality suite on random warps.
void inequality_suite(Outcome& o) {
  int violations = 0;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = property::random_case(seed);
    for (const auto& v : property::check_case(c)) {
      ++violations;
      o.detail << "seed " << seed << ": " << v.what << " (" << v.amount << "); ";
    }
    checked += static_cast<int>(c.gaps.size());
  }
  o.detail << checked << " (warp, t, T) cases, " << violations << " violations";
  o.require(violations == 0, "inequality violations");
}

// 7. Mesh against the radial oracle.
void mesh_cross_validation(Outcome& o) {
  const double t = 0.1;
  const double a = 1, b = 10;
  const auto q = oracle::catenoid::flux_for_drop(t, a, b);
  const double radial = static_cast<double>(oracle::catenoid::area(q, a, b));
  const auto coarse = polar_annulus(a, b, 8, 40);
  const auto mid = refine(coarse);
  const auto fine = refine(mid);
  const auto sol = solve(fine, t, MeshMode::Dirichlet);
  const auto flux = boundary_flux(sol, fine);
  o.detail << fine.triangles.size() << " triangles J=" << sol.J << " radial=" << radial << " flux=" << flux.total
           << " window=[" << sol.J / t << "," << 2 * sol.J / t << "]";
  o.require(rel(sol.J, radial) < 0.02, "mesh capacity off by more than 2%");
  o.require(flux.total >= sol.J / t * 0.95 && flux.total <= 2 * sol.J / t * 1.05, "flux outside window");
  const auto ex = refine_and_extrapolate(coarse, t, MeshMode::Dirichlet, 3);
  o.detail << " order=" << ex.order;
  o.require(ex.extrapolated_ok && ex.order >= 1.5, "refinement order below 1.5");
}

// 8. Slice convergence on the necked pole.
void slice_convergence_check(Outcome& o) {
  const auto m = build(ExampleSpec{"prop2_6", {{"n", 2}}});
  std::vector<double> R;
  for (int k = 1; k <= 6; ++k) R.push_back(k * kPi);
  const auto s = slice_convergence(m, 1.0, 1.0, R, 2.0);
  o.detail << "sups:";
  for (double v : s.sups) o.detail << " " << v;
  o.require(s.monotone, "not monotone");
  o.require(!s.sups.empty() && s.sups.back() < 0.05, "sup not below 0.05 at the 6th neck");
}

// 9. Mollifier constants and ratio stability.
void mollifier_suite(Outcome& o) {
  const std::vector<double> lambdas{0.1, 0.2, 0.5, 1.0, 2.0};
  const std::vector<std::pair<const char*, std::function<double(double)>>> fields{
      {"|x|", [](double x) { return std::abs(x); }}, {"sin 3x", [](double x) { return std::sin(3 * x); }}};
  auto sample = [](std::size_t points, const std::function<double(double)>& f) {
    return GridField::sample(1, points, 1, 4.0 / static_cast<double>(points - 1), -2.0, 0.0,
                             [&](double x, double) { return f(x); });
  };
  for (std::size_t points : {801u, 1601u}) {
    const auto c = mollify(sample(points, [](double) { return 1.7; }), 0.3);
    bool exact = c.sup_gradient == 0;
    for (double v : c.field.values) exact = exact && v == 1.7;
    o.require(exact, "constant not reproduced");
  }
  double fitted_gradient = 0, fitted_energy = 0, worst_drift = 0;
  std::vector<std::pair<double, double>> coarse_ratios;
  for (const auto& [name, f] : fields)
    for (double lambda : lambdas) {
      const auto r = mollify(sample(801, f), lambda);
      fitted_gradient = std::max(fitted_gradient, r.gradient_ratio);
      fitted_energy = std::max(fitted_energy, r.energy_ratio);
      coarse_ratios.emplace_back(r.gradient_ratio, r.energy_ratio);
    }
  std::size_t idx = 0;
  for (const auto& [name, f] : fields)
    for (double lambda : lambdas) {
      const auto r = mollify(sample(1601, f), lambda);
      const auto [g0, e0] = coarse_ratios[idx++];
      const double drift = std::max(std::abs(r.gradient_ratio - g0) / g0, std::abs(r.energy_ratio - e0) / e0);
      worst_drift = std::max(worst_drift, drift);
      o.require(drift < 0.2, std::string("ratio drift for ") + name);
      o.require(r.gradient_ratio <= fitted_gradient * 1.2 && r.energy_ratio <= fitted_energy * 1.2,
                std::string("ratio above fitted constant for ") + name);
    }
  o.detail << "C_gradient=" << fitted_gradient << " C_energy=" << fitted_energy << " max drift=" << worst_drift;
}

// 10. Flat asymptotics.
void asymptotics(Outcome& o) {
  for (int n : {3, 4}) {
    const auto m = build(ExampleSpec{"flat", {{"n", n}}});
    const auto a = asymptotic_audit(m, 1.0, 0.5, {4, 8, 16, 32, 64, 128, 256});
    o.detail << "n=" << n << " spread=" << a.spread << " theta*=" << a.theta_star << "; ";
    o.require(a.spread < 1e-2, "ratio not constant within 1% for n=" + std::to_string(n));
  }
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "staircase exactness", 1, staircase_exactness},
      {2, "staircase capacity", 10, staircase_capacity},
      {3, "oscillation bound", 5, oscillation_bound},
      {4, "necked pole classification", 30, necked_pole},
      {5, "flat-space oracle", 10, flat_oracle},
      {6, "inequality suite", 120, inequality_suite},
      {7, "mesh cross-validation", 120, mesh_cross_validation},
      {8, "slice convergence", 60, slice_convergence_check},
      {9, "mollifier suite", 60, mollifier_suite},
      {10, "asymptotics", 30, asymptotics},
  };
  return all;
}

bool run(const Criterion& c) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < c.time_limit_s, "runtime above " + std::to_string(c.time_limit_s) + " s");
  std::printf("criterion %2d %s: %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs,
              o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > static_cast<int>(criteria().size())) {
      std::cerr << "usage: mincap_acceptance [criterion 1-10 ...]\n";
      return 2;
    }
    selected.push_back(id);
  }
  bool all_pass = true;
  for (const auto& c : criteria())
    if (selected.empty() || std::find(selected.begin(), selected.end(), c.id) != selected.end())
      all_pass = run(c) && all_pass;
  return all_pass ? 0 : 1;
}
