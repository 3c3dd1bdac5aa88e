#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mincap/capacity.hpp"
#include "mincap/warped_manifold.hpp"

namespace mincap {

enum class Parabolicity { Parabolic, Nonparabolic, Undetermined };
enum class MParabolicity { MParabolic, MNonparabolic, Undetermined };
std::string to_string(Parabolicity p);
std::string to_string(MParabolicity p);

/// One piece of evidence: an integral certificate or a witnessed sequence.
struct Evidence {
  std::string criterion;
  std::optional<IntegralCertificate> certificate;
  std::vector<double> witness_radii;
  std::vector<double> witness_values;
  double value = 0;
  std::string note;
};

struct Classification {
  Parabolicity parabolicity = Parabolicity::Undetermined;
  MParabolicity m_parabolicity = MParabolicity::Undetermined;
  std::vector<Evidence> evidence;
  const Evidence* find(const std::string& criterion) const;
};

struct ClassifyOptions {
  quad::TailOptions tail{};
  double neck_scan_max = 1e5;
  double cutoff_tol = 1e-3;
  /// Gap used for the exhaustion test.
  double t = 1.0;
  int exhaustion_doublings = 20;
  /// Relative growth of -ln w(R) / R over the last doublings that counts as superexponential decay.
  double superexp_growth = 1.0;
};

/// Parabolicity from the certificate for the integral of w^{-kappa}; M-parabolicity
/// from (in order) parabolicity, the neck cutoff bound n omega_n 2^n w^{n-1}(r_i),
/// superexponential decay of w, and the exhaustion limit of cap_t.
Classification classify(const WarpedManifold& m, const ClassifyOptions& opts = {});
nlohmann::json to_json(const Classification& c);

enum class BoundaryVerdict { Nondegenerate, Degenerate, Undetermined };
std::string to_string(BoundaryVerdict v);

struct BoundaryTest {
  BoundaryVerdict verdict = BoundaryVerdict::Undetermined;
  /// Certified lower bound for the sphere areas beyond r0 (nondegenerate only).
  double epsilon = 0;
  std::vector<double> record_radii;
  std::vector<double> record_areas;
};

/// Record lows of sphere_area over [r0, r_max] (geometric scan plus critical points).
BoundaryTest nondegenerate_boundary_test(const WarpedManifold& m, double r0, double r_max = 33554432.0);
nlohmann::json to_json(const BoundaryTest& b);

struct SliceConvergence {
  std::vector<double> radii;
  std::vector<double> sups;  // sup over [r_a, probe] of |t - u_R|
  bool monotone = true;
};

/// Needs an M-parabolic manifold (PreconditionError otherwise).
SliceConvergence slice_convergence(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                   double probe_radius, const Classification& classification);
SliceConvergence slice_convergence(const WarpedManifold& m, double r_a, double t, const std::vector<double>& R_list,
                                   double probe_radius);

}  // namespace mincap
