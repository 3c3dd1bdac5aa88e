#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mincap/mesh.hpp"

namespace mincap {

enum class MeshMode { Dirichlet, Relaxed };

struct MeshSolveOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-10;  // relative to 1 + |J|
};

struct EdgeFlux {
  int a;
  int b;
  double length;
  double density;  // <Du / sqrt(1 + |Du|^2), inward normal>
};

struct MeshSolution {
  double t = 0;
  MeshMode mode = MeshMode::Dirichlet;
  std::vector<double> u;
  double J = 0;             // objective, the cap_t estimate
  double interior = 0;      // sum |T| (sqrt(1 + |Du|^2) - 1)
  double trace_K = 0;       // relaxed: sum of vertex weights times (t - u) on K
  double trace_outer = 0;   // relaxed: sum of vertex weights times u on outer
  std::vector<double> deficit_K;      // t - u per K vertex
  std::vector<double> deficit_outer;  // u per outer vertex
  int iterations = 0;
  double gradient_norm = 0;
  double min_pivot = 0;     // smallest LDL^T pivot over all Newton steps
  std::vector<double> objective_history;
};

/// Minimizes sum_T |T| (sqrt(1 + |Du|^2) - 1) over P1 functions with values in
/// [0, t]: Dirichlet mode pins u = t on K and u = 0 on outer; relaxed mode adds
/// the exact P1 trace penalties with edge-length weights.
MeshSolution solve(const TriMesh& mesh, double t, MeshMode mode, const MeshSolveOptions& opts = {});

struct FluxResult {
  double total = 0;        // |mu| from the K edges
  double variational = 0;  // reaction of the discrete objective at K vertices
  std::vector<EdgeFlux> edges;
};

FluxResult boundary_flux(const MeshSolution& sol, const TriMesh& mesh);

struct Extrapolation {
  std::vector<double> levels;  // J per refinement level
  std::vector<int> triangles;
  double extrapolated = 0;
  double order = 0;
  bool extrapolated_ok = false;
  std::string warning;
};

/// Solves on `levels` nested refinements of `coarse` and Richardson-extrapolates
/// the last three values.
Extrapolation refine_and_extrapolate(const TriMesh& coarse, double t, MeshMode mode, int levels = 3,
                                     const MeshSolveOptions& opts = {});

void write_solution_csv(std::ostream& out, const TriMesh& mesh, const MeshSolution& sol);

}  // namespace mincap
