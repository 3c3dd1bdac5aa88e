#include "mincap/classifier.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

#include "mincap/error.hpp"
#include "mincap/estimates.hpp"

namespace mincap {
namespace {

struct RecordScan {
  std::vector<double> radii;
  std::vector<double> weights;
  double first_weight = 0;
  double stopped_at = 0;  // last radius scanned
  bool underflow = false;
};

// Running minima of w^{n-1} over [r0, r1], decade by decade. `stop` is asked
// after every new record and may end the scan early.
template <class Stop>
RecordScan scan_record_lows(const WarpedManifold& m, double r0, double r1, Stop stop) {
  RecordScan scan;
  const WarpFunction& warp = m.warp_function();
  double a = r0;
  double record = std::numeric_limits<double>::infinity();
  bool first = true;
  while (a < r1) {
    const double b = std::min(r1, 10 * a);
    std::vector<double> samples = log_grid(a, b, 64, 2);
    const std::vector<double> crit = warp.critical_points(a, b);
    samples.insert(samples.end(), crit.begin(), crit.end());
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double r = samples[i];
      double W;
      try {
        W = m.weight(r);
      } catch (const InputError&) {
        scan.underflow = true;
        scan.stopped_at = r;
        return scan;
      }
      if (first) {
        scan.first_weight = W;
        first = false;
      }
      if (!(W < record)) continue;
      double loc = r;
      if (!std::binary_search(crit.begin(), crit.end(), r) && i > 0 && i + 1 < samples.size()) {
        auto f = [&m](double x) { return m.weight(x); };
        try {
          const auto [x, fx] = boost::math::tools::brent_find_minima(f, samples[i - 1], samples[i + 1], 52);
          if (fx < W) {
            W = fx;
            loc = x;
          }
        } catch (const InputError&) {
        }
      }
      record = W;
      scan.radii.push_back(loc);
      scan.weights.push_back(W);
      if (stop(scan)) {
        scan.stopped_at = r;
        return scan;
      }
    }
    scan.stopped_at = b;
    a = b;
  }
  return scan;
}

// Keeps the first and the last `keep` entries of a witness sequence.
void thin(std::vector<double>& radii, std::vector<double>& values, std::size_t keep = 64) {
  if (radii.size() <= 2 * keep) return;
  std::vector<double> r(radii.begin(), radii.begin() + keep);
  std::vector<double> v(values.begin(), values.begin() + keep);
  r.insert(r.end(), radii.end() - keep, radii.end());
  v.insert(v.end(), values.end() - keep, values.end());
  radii = std::move(r);
  values = std::move(v);
}

nlohmann::json certificate_json(const IntegralCertificate& c) {
  nlohmann::json j;
  j["verdict"] = to_string(c.verdict);
  j["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json("inf");
  j["tail_bound"] = std::isfinite(c.tail_bound) ? nlohmann::json(c.tail_bound) : nlohmann::json("inf");
  j["r_cut"] = c.r_cut;
  return j;
}

bool warp_is_monotone_on(const WarpedManifold& m, double a, double b) {
  return m.warp_function().critical_points(a, b).empty();
}

}  // namespace

std::string to_string(Parabolicity p) {
  switch (p) {
    case Parabolicity::Parabolic: return "parabolic";
    case Parabolicity::Nonparabolic: return "nonparabolic";
    case Parabolicity::Undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string to_string(MParabolicity p) {
  switch (p) {
    case MParabolicity::MParabolic: return "m_parabolic";
    case MParabolicity::MNonparabolic: return "m_nonparabolic";
    case MParabolicity::Undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string to_string(BoundaryVerdict v) {
  switch (v) {
    case BoundaryVerdict::Nondegenerate: return "nondegenerate";
    case BoundaryVerdict::Degenerate: return "degenerate";
    case BoundaryVerdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

const Evidence* Classification::find(const std::string& criterion) const {
  for (const Evidence& e : evidence)
    if (e.criterion == criterion) return &e;
  return nullptr;
}

Classification classify(const WarpedManifold& m, const ClassifyOptions& opts) {
  Classification c;
  const int n = m.dimension();
  const double kappa = m.kappa();
  const double r0 = std::max(1.0, m.r_min());

  // Parabolicity: integral of w^{-kappa} over [r0, inf).
  {
    Evidence e;
    e.criterion = "harmonic_normalizer";
    e.certificate = m.improper_integral(-kappa, r0, opts.tail);
    e.value = e.certificate->value;
    e.note = "integral of w^-kappa from r0";
    switch (e.certificate->verdict) {
      case Verdict::Convergent: c.parabolicity = Parabolicity::Nonparabolic; break;
      case Verdict::Divergent: c.parabolicity = Parabolicity::Parabolic; break;
      case Verdict::Undetermined: c.parabolicity = Parabolicity::Undetermined; break;
    }
    c.evidence.push_back(std::move(e));
  }
  if (c.parabolicity == Parabolicity::Nonparabolic) {
    Evidence e;
    e.criterion = "classical_energy";
    e.certificate = m.improper_integral(n - 1 - 2 * kappa, r0, opts.tail);
    e.value = e.certificate->value;
    e.note = "integral of w^(n-1-2kappa): finite classical capacity";
    c.evidence.push_back(std::move(e));
  }
  // Volume-growth cross-check, only for monotone warps about a pole.
  if (m.closure() == Closure::SmoothPole && warp_is_monotone_on(m, r0, 1e4 * r0)) {
    Evidence e;
    e.criterion = "phi_cross_check";
    e.certificate = phi_integral(m, r0, opts.tail);
    e.value = e.certificate->value;
    const Verdict v = e.certificate->verdict;
    const bool agrees = (v == Verdict::Convergent && c.parabolicity == Parabolicity::Nonparabolic) ||
                        (v == Verdict::Divergent && c.parabolicity == Parabolicity::Parabolic);
    e.note = agrees ? "agrees with the normalizer verdict" : "does not confirm the normalizer verdict";
    c.evidence.push_back(std::move(e));
  }

  if (c.parabolicity == Parabolicity::Parabolic) {
    Evidence e;
    e.criterion = "parabolic_implies_m_parabolic";
    e.note = "a parabolic manifold is M-parabolic";
    c.evidence.push_back(std::move(e));
    c.m_parabolicity = MParabolicity::MParabolic;
    return c;
  }

  // Neck search: record lows of w^{n-1}; cutoff bound n omega_n 2^n w^{n-1}(r_i).
  const double cutoff_factor = m.unit_sphere_area() * std::exp2(n);
  const double scan_max = std::min(opts.neck_scan_max, m.r_max());
  RecordScan scan = scan_record_lows(m, r0, scan_max, [&](const RecordScan& s) {
    return s.radii.size() >= 3 && cutoff_factor * s.weights.back() < opts.cutoff_tol;
  });
  {
    Evidence e;
    e.criterion = "neck_cutoff";
    e.witness_radii = scan.radii;
    for (double W : scan.weights) e.witness_values.push_back(cutoff_factor * W);
    e.value = e.witness_values.empty() ? 0.0 : e.witness_values.back();
    const bool certified = e.witness_values.size() >= 3 && e.value < opts.cutoff_tol;
    e.note = certified ? "cutoff capacities fall below tolerance along record necks" : "no neck sequence certified";
    thin(e.witness_radii, e.witness_values);
    c.evidence.push_back(std::move(e));
    if (certified) {
      c.m_parabolicity = MParabolicity::MParabolic;
      return c;
    }
  }

  // Superexponential decay of w: -ln w(R) / R keeps growing over the last doublings.
  {
    std::vector<double> radii, g;
    const double top = scan.underflow ? scan.stopped_at : scan_max;
    for (double R = r0; R <= top; R *= 2) {
      try {
        const double w = m.warp(R);
        radii.push_back(R);
        g.push_back(-std::log(w) / R);
      } catch (const InputError&) {
        break;
      }
    }
    Evidence e;
    e.criterion = "superexponential_decay";
    bool certified = false;
    if (g.size() >= 7) {
      const std::size_t k = g.size();
      bool increasing = true;
      for (std::size_t i = k - 6; i < k; ++i)
        if (!(g[i] > g[i - 1])) increasing = false;
      certified = increasing && g[k - 1] > 0 && g[k - 1] - g[k - 7] >= opts.superexp_growth;
    }
    e.witness_radii = radii;
    e.witness_values = g;
    e.value = g.empty() ? 0.0 : g.back();
    e.note = certified ? "-ln w(R)/R grows without bound" : "no superexponential decay detected";
    c.evidence.push_back(std::move(e));
    if (certified) {
      c.m_parabolicity = MParabolicity::MParabolic;
      return c;
    }
  }

  // Exhaustion limit of cap_t(B_{r0}, B_R).
  {
    std::vector<double> R_list;
    for (int k = 1; k <= opts.exhaustion_doublings; ++k) {
      const double R = r0 * std::exp2(k);
      if (R > m.r_max()) break;
      R_list.push_back(R);
    }
    Evidence e;
    e.criterion = "exhaustion_limit";
    if (!R_list.empty()) {
      try {
        const CapacityResult ex = capacity_exhaustion(m, r0, opts.t, R_list);
        const double threshold = 1e-4 * opts.t * m.sphere_area(r0);
        e.witness_radii = ex.sequence_radii;
        e.witness_values = ex.sequence_values;
        e.value = ex.value - ex.tail_estimate;
        if (e.value > threshold) {
          e.note = "limit stays above 1e-4 t sphere_area(r0)";
          if (c.parabolicity != Parabolicity::Parabolic) c.m_parabolicity = MParabolicity::MNonparabolic;
        } else {
          e.note = "limit below threshold: M-parabolic suspect";
        }
      } catch (const Error& err) {
        e.note = std::string("exhaustion failed: ") + err.what();
      }
    }
    c.evidence.push_back(std::move(e));
  }

  if (c.parabolicity == Parabolicity::Parabolic && c.m_parabolicity == MParabolicity::MNonparabolic)
    throw Error("inconsistent classification: parabolic and M-nonparabolic");
  return c;
}

nlohmann::json to_json(const Classification& c) {
  nlohmann::json j;
  j["parabolicity"] = to_string(c.parabolicity);
  j["m_parabolicity"] = to_string(c.m_parabolicity);
  nlohmann::json ev = nlohmann::json::array();
  for (const Evidence& e : c.evidence) {
    nlohmann::json x;
    x["criterion"] = e.criterion;
    if (e.certificate) x["certificate"] = certificate_json(*e.certificate);
    if (!e.witness_radii.empty()) {
      x["witness_radii"] = e.witness_radii;
      x["witness_values"] = e.witness_values;
    }
    x["value"] = std::isfinite(e.value) ? nlohmann::json(e.value) : nlohmann::json("inf");
    x["note"] = e.note;
    ev.push_back(x);
  }
  j["evidence"] = ev;
  return j;
}

BoundaryTest nondegenerate_boundary_test(const WarpedManifold& m, double r0, double r_max) {
  if (!(r0 > 0)) throw InputError("boundary test needs r0 > 0");
  BoundaryTest b;
  const double start = std::max(r0, m.r_min());
  const double stop = std::min(r_max, m.r_max());
  RecordScan scan = scan_record_lows(m, start, stop, [](const RecordScan& s) {
    return s.weights.size() >= 3 && s.weights.back() < 1e-3 * s.first_weight;
  });
  const double area = m.unit_sphere_area();
  for (std::size_t i = 0; i < scan.radii.size(); ++i) {
    b.record_radii.push_back(scan.radii[i]);
    b.record_areas.push_back(area * scan.weights[i]);
  }
  const auto& A = b.record_areas;
  if (A.empty()) return b;
  if (scan.underflow || (A.size() >= 3 && A.back() < 1e-3 * area * scan.first_weight)) {
    b.verdict = BoundaryVerdict::Degenerate;
    thin(b.record_radii, b.record_areas);
    return b;
  }
  // stable envelope: no new record in the last decade of the scan
  if (b.record_radii.back() < stop / 10) {
    b.verdict = BoundaryVerdict::Nondegenerate;
    b.epsilon = A.back();
  } else if (A.size() >= 4) {
    // geometric model for the remaining record decrements
    const std::size_t k = A.size();
    const double d0 = A[k - 4] - A[k - 3];
    const double d1 = A[k - 3] - A[k - 2];
    const double d2 = A[k - 2] - A[k - 1];
    const bool ok = d0 > 0 && d1 > 0 && d2 > 0;
    const double rho = ok ? std::max(d1 / d0, d2 / d1) : 1.0;
    if (ok && rho < 0.9) {
      const double limit = A.back() - d2 * rho / (1 - rho);
      if (limit > 0) {
        b.verdict = BoundaryVerdict::Nondegenerate;
        b.epsilon = limit;
      }
    }
  }
  thin(b.record_radii, b.record_areas);
  return b;
}

nlohmann::json to_json(const BoundaryTest& b) {
  return {{"verdict", to_string(b.verdict)},
          {"epsilon", b.epsilon},
          {"record_radii", b.record_radii},
          {"record_areas", b.record_areas}};
}

SliceConvergence slice_convergence(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                   double probe_radius, const Classification& classification) {
  if (classification.m_parabolicity != MParabolicity::MParabolic)
    throw PreconditionError("slice convergence needs an M-parabolic manifold");
  if (!(probe_radius > r_a)) throw InputError("probe radius must exceed r_a");
  SliceConvergence s;
  RadialOptions opts;
  opts.grid_points = 2;
  for (double R : R_list) {
    if (!(R > probe_radius)) throw InputError("outer radii must exceed the probe radius");
    RadialProfile p = shoot_for_drop(m, r_a, R, t, opts);
    // u is nonincreasing, so the sup over [r_a, probe] sits at the probe
    const double sup = t - profile_value(m, p, probe_radius, opts);
    if (!s.sups.empty() && sup > s.sups.back() * (1 + 1e-9) + 1e-15) s.monotone = false;
    s.radii.push_back(R);
    s.sups.push_back(sup);
  }
  return s;
}

SliceConvergence slice_convergence(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                   double probe_radius) {
  return slice_convergence(m, r_a, t, R_list, probe_radius, classify(m));
}

}  // namespace mincap
