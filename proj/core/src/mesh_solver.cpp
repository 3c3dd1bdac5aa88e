#include "mincap/mesh_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

#include "mincap/error.hpp"

namespace mincap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Element {
  std::array<int, 3> v;
  double area;
  std::array<Point2, 3> grad;  // gradients of the barycentric hat functions
};

std::vector<Element> elements(const TriMesh& mesh) {
  std::vector<Element> out;
  out.reserve(mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    const double A = mesh.triangle_area(i);
    Element e{t, A, {}};
    for (int k = 0; k < 3; ++k) {
      const Point2& b = mesh.vertices[t[(k + 1) % 3]];
      const Point2& c = mesh.vertices[t[(k + 2) % 3]];
      e.grad[k] = {(b[1] - c[1]) / (2 * A), (c[0] - b[0]) / (2 * A)};
    }
    out.push_back(e);
  }
  return out;
}

Point2 element_gradient(const Element& e, const std::vector<double>& u) {
  Point2 g{0, 0};
  for (int k = 0; k < 3; ++k) {
    g[0] += u[e.v[k]] * e.grad[k][0];
    g[1] += u[e.v[k]] * e.grad[k][1];
  }
  return g;
}

double area_excess(double g2) { return g2 / (std::sqrt(1 + g2) + 1); }

// Half the length of each tagged boundary edge, accumulated at its endpoints.
std::vector<double> trace_weights(const TriMesh& mesh, const std::vector<int>& tagged) {
  std::vector<char> in(mesh.vertices.size(), 0);
  for (int v : tagged) in[v] = 1;
  std::vector<double> w(mesh.vertices.size(), 0.0);
  for (const auto& e : mesh.boundary_edges()) {
    if (!in[e.a] || !in[e.b]) continue;
    const double len = std::hypot(mesh.vertices[e.b][0] - mesh.vertices[e.a][0],
                                  mesh.vertices[e.b][1] - mesh.vertices[e.a][1]);
    w[e.a] += 0.5 * len;
    w[e.b] += 0.5 * len;
  }
  return w;
}

}  // namespace

MeshSolution solve(const TriMesh& mesh, double t, MeshMode mode, const MeshSolveOptions& opts) {
  if (!(t >= 0) || !std::isfinite(t)) throw InputError("mesh solve needs a finite t >= 0");
  mesh.validate();
  const auto elems = elements(mesh);
  const std::size_t N = mesh.vertices.size();
  const bool relaxed = mode == MeshMode::Relaxed;

  std::vector<char> is_K(N, 0), is_outer(N, 0);
  for (int v : mesh.K) is_K[v] = 1;
  for (int v : mesh.outer) is_outer[v] = 1;
  const std::vector<double> wK = relaxed ? trace_weights(mesh, mesh.K) : std::vector<double>(N, 0.0);
  const std::vector<double> wO = relaxed ? trace_weights(mesh, mesh.outer) : std::vector<double>(N, 0.0);
  auto fixed = [&](std::size_t i) { return !relaxed && (is_K[i] || is_outer[i]); };

  std::vector<double> u(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    if (is_K[i]) u[i] = t;

  auto interior = [&](const std::vector<double>& v) {
    double s = 0;
    for (const auto& e : elems) {
      const Point2 g = element_gradient(e, v);
      s += e.area * area_excess(g[0] * g[0] + g[1] * g[1]);
    }
    return s;
  };
  auto traces = [&](const std::vector<double>& v) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < N; ++i) {
      a += wK[i] * (t - v[i]);
      b += wO[i] * v[i];
    }
    return std::pair{a, b};
  };
  auto objective = [&](const std::vector<double>& v) {
    const auto [a, b] = traces(v);
    return interior(v) + a + b;
  };

  std::vector<double> grad(N);
  std::vector<Eigen::Triplet<double>> trip;
  auto assemble = [&](const std::vector<double>& v) {
    std::fill(grad.begin(), grad.end(), 0.0);
    trip.clear();
    for (const auto& e : elems) {
      const Point2 g = element_gradient(e, v);
      const double s2 = 1 + g[0] * g[0] + g[1] * g[1];
      const double s = std::sqrt(s2);
      const double sigma0 = g[0] / s, sigma1 = g[1] / s;
      // Hessian of sqrt(1 + |g|^2): (I - sigma sigma^T) / s, positive definite
      const double m00 = (1 - sigma0 * sigma0) / s, m01 = -sigma0 * sigma1 / s, m11 = (1 - sigma1 * sigma1) / s;
      for (int a = 0; a < 3; ++a) {
        const auto& ga = e.grad[a];
        grad[e.v[a]] += e.area * (sigma0 * ga[0] + sigma1 * ga[1]);
        for (int b = 0; b < 3; ++b) {
          const auto& gb = e.grad[b];
          const double h = e.area * (ga[0] * (m00 * gb[0] + m01 * gb[1]) + ga[1] * (m01 * gb[0] + m11 * gb[1]));
          trip.emplace_back(e.v[a], e.v[b], h);
        }
      }
    }
    for (std::size_t i = 0; i < N; ++i) grad[i] += wO[i] - wK[i];
  };

  const double bound_tol = 1e-14 * std::max(t, 1e-300);
  auto active = [&](std::size_t i, const std::vector<double>& v) {
    if (fixed(i)) return true;
    if (v[i] <= bound_tol && grad[i] > 0) return true;
    if (v[i] >= t - bound_tol && grad[i] < 0) return true;
    return false;
  };
  auto project = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < N; ++i)
      if (!fixed(i)) v[i] = std::clamp(v[i], 0.0, t);
  };

  MeshSolution sol;
  sol.t = t;
  sol.mode = mode;
  sol.min_pivot = kInf;
  double J = objective(u);
  sol.objective_history.push_back(J);
  double pg = 0;
  bool converged = false;
  int it = 0;
  std::vector<double> d(N), trial(N);
  std::vector<int> index(N);
  for (; it < opts.max_iterations; ++it) {
    assemble(u);
    pg = 0;
    for (std::size_t i = 0; i < N; ++i)
      if (!active(i, u)) pg += grad[i] * grad[i];
    pg = std::sqrt(pg);
    if (pg < opts.gradient_tol * (1 + std::abs(J)) || t == 0) {
      converged = true;
      break;
    }
    int F = 0;
    for (std::size_t i = 0; i < N; ++i) index[i] = active(i, u) ? -1 : F++;
    std::vector<Eigen::Triplet<double>> reduced;
    reduced.reserve(trip.size());
    double scale = 0;
    for (const auto& tr : trip) {
      const int a = index[tr.row()], b = index[tr.col()];
      if (a < 0 || b < 0) continue;
      reduced.emplace_back(a, b, tr.value());
      if (a == b) scale = std::max(scale, tr.value());
    }
    const double shift = 1e-12 * std::max(scale, 1e-300);
    for (int a = 0; a < F; ++a) reduced.emplace_back(a, a, shift);
    Eigen::SparseMatrix<double> H(F, F);
    H.setFromTriplets(reduced.begin(), reduced.end());
    Eigen::VectorXd rhs(F);
    for (std::size_t i = 0; i < N; ++i)
      if (index[i] >= 0) rhs[index[i]] = -grad[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
    std::fill(d.begin(), d.end(), 0.0);
    if (ldlt.info() == Eigen::Success) {
      const auto D = ldlt.vectorD();
      if (D.size() > 0) sol.min_pivot = std::min(sol.min_pivot, D.minCoeff());
      const Eigen::VectorXd step = ldlt.solve(rhs);
      for (std::size_t i = 0; i < N; ++i)
        if (index[i] >= 0) d[i] = step[index[i]];
    }

    auto line_search = [&](const std::vector<double>& dir) {
      double step = 1.0;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        for (std::size_t i = 0; i < N; ++i) trial[i] = u[i] + step * dir[i];
        project(trial);
        double decrease = 0;
        for (std::size_t i = 0; i < N; ++i) decrease += grad[i] * (trial[i] - u[i]);
        const double Jt = objective(trial);
        if (Jt < J && Jt <= J + 1e-4 * decrease) return Jt;
      }
      return kInf;
    };
    double Jt = line_search(d);
    if (!std::isfinite(Jt)) {
      std::vector<double> diag(N, 0.0);
      for (const auto& tr : trip)
        if (tr.row() == tr.col()) diag[tr.row()] += tr.value();
      for (std::size_t i = 0; i < N; ++i) d[i] = index[i] >= 0 ? -grad[i] / std::max(diag[i], 1e-300) : 0.0;
      Jt = line_search(d);
    }
    if (!std::isfinite(Jt)) {
      if (pg < 1e-7 * (1 + std::abs(J))) {
        converged = true;
        break;
      }
      throw ConvergenceError("mesh Newton iteration stagnated", pg, it);
    }
    u = trial;
    J = Jt;
    sol.objective_history.push_back(J);
  }
  if (!converged) throw ConvergenceError("mesh Newton iteration hit the iteration limit", pg, it);

  sol.u = std::move(u);
  sol.iterations = it;
  sol.gradient_norm = pg;
  if (!std::isfinite(sol.min_pivot)) sol.min_pivot = 0;
  sol.interior = interior(sol.u);
  const auto [a, b] = traces(sol.u);
  sol.trace_K = a;
  sol.trace_outer = b;
  sol.J = sol.interior + a + b;
  for (int v : mesh.K) sol.deficit_K.push_back(t - sol.u[v]);
  for (int v : mesh.outer) sol.deficit_outer.push_back(sol.u[v]);
  return sol;
}

FluxResult boundary_flux(const MeshSolution& sol, const TriMesh& mesh) {
  if (sol.u.size() != mesh.vertices.size()) throw InputError("solution does not match the mesh");
  const auto elems = elements(mesh);
  std::vector<char> is_K(mesh.vertices.size(), 0);
  for (int v : mesh.K) is_K[v] = 1;

  FluxResult out;
  double signed_total = 0;
  for (const auto& e : mesh.boundary_edges()) {
    if (!is_K[e.a] || !is_K[e.b]) continue;
    const Point2& pa = mesh.vertices[e.a];
    const Point2& pb = mesh.vertices[e.b];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    // counterclockwise triangles lie to the left of a -> b
    const Point2 nu{-(pb[1] - pa[1]) / len, (pb[0] - pa[0]) / len};
    const Point2 g = element_gradient(elems[e.triangle], sol.u);
    const double s = std::sqrt(1 + g[0] * g[0] + g[1] * g[1]);
    const double density = (g[0] * nu[0] + g[1] * nu[1]) / s;
    out.edges.push_back({e.a, e.b, len, density});
    signed_total += len * density;
  }
  out.total = std::abs(signed_total);

  double reaction = 0;
  for (const auto& e : elems) {
    const Point2 g = element_gradient(e, sol.u);
    const double s = std::sqrt(1 + g[0] * g[0] + g[1] * g[1]);
    for (int k = 0; k < 3; ++k)
      if (is_K[e.v[k]]) reaction += e.area * (g[0] * e.grad[k][0] + g[1] * e.grad[k][1]) / s;
  }
  out.variational = std::abs(reaction);
  return out;
}

Extrapolation refine_and_extrapolate(const TriMesh& coarse, double t, MeshMode mode, int levels,
                                     const MeshSolveOptions& opts) {
  if (levels < 3) throw InputError("extrapolation needs at least 3 levels");
  Extrapolation ex;
  TriMesh mesh = coarse;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) mesh = refine(mesh);
    ex.levels.push_back(solve(mesh, t, mode, opts).J);
    ex.triangles.push_back(static_cast<int>(mesh.triangles.size()));
  }
  const double J0 = ex.levels[levels - 3], J1 = ex.levels[levels - 2], J2 = ex.levels[levels - 1];
  const double d1 = J0 - J1, d2 = J1 - J2;
  if (d1 == 0 && d2 == 0) {
    ex.extrapolated = J2;
    ex.extrapolated_ok = true;
    ex.warning = "levels agree exactly";
    return ex;
  }
  if (d1 * d2 <= 0 || std::abs(d2) >= std::abs(d1)) {
    ex.extrapolated = J2;
    ex.warning = "non-monotone level sequence; no extrapolation";
    return ex;
  }
  ex.order = std::log2(d1 / d2);
  ex.extrapolated = J2 - d2 / (std::exp2(ex.order) - 1);
  ex.extrapolated_ok = true;
  return ex;
}

void write_solution_csv(std::ostream& out, const TriMesh& mesh, const MeshSolution& sol) {
  out << "vertex,x,y,u\n" << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    out << i << ',' << mesh.vertices[i][0] << ',' << mesh.vertices[i][1] << ',' << sol.u[i] << '\n';
}

}  // namespace mincap
