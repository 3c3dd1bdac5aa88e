#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>

#include "mincap/error.hpp"
#include "mincap/mesh.hpp"

namespace mincap {
namespace {

struct Tri {
  std::array<int, 3> v;
  long double cx, cy, r2;
  bool alive = true;
};

Tri make_tri(const std::vector<Point2>& p, int a, int b, int c) {
  const long double ax = p[a][0], ay = p[a][1];
  const long double bx = p[b][0] - ax, by = p[b][1] - ay;
  const long double cx = p[c][0] - ax, cy = p[c][1] - ay;
  long double d = 2 * (bx * cy - by * cx);
  if (d < 0) {
    std::swap(b, c);
    d = -d;
    return make_tri(p, a, b, c);
  }
  const long double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const long double ux = (cy * b2 - by * c2) / d;
  const long double uy = (bx * c2 - cx * b2) / d;
  return Tri{{a, b, c}, ax + ux, ay + uy, ux * ux + uy * uy};
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& input) {
  if (input.size() < 3) throw InputError("Delaunay triangulation needs at least 3 points");
  double lo_x = input[0][0], hi_x = lo_x, lo_y = input[0][1], hi_y = lo_y;
  for (const auto& q : input) {
    lo_x = std::min(lo_x, q[0]);
    hi_x = std::max(hi_x, q[0]);
    lo_y = std::min(lo_y, q[1]);
    hi_y = std::max(hi_y, q[1]);
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  const double mx = 0.5 * (lo_x + hi_x), my = 0.5 * (lo_y + hi_y);
  std::vector<Point2> p = input;
  const int n = static_cast<int>(input.size());
  p.push_back({mx - 20 * span, my - 10 * span});
  p.push_back({mx + 20 * span, my - 10 * span});
  p.push_back({mx, my + 20 * span});

  std::vector<Tri> tris{make_tri(p, n, n + 1, n + 2)};
  std::vector<int> bad;
  for (int i = 0; i < n; ++i) {
    const long double px = p[i][0], py = p[i][1];
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      const long double dx = px - tris[t].cx, dy = py - tris[t].cy;
      if (dx * dx + dy * dy < tris[t].r2 * (1 + 1e-12L)) bad.push_back(t);
    }
    std::map<std::pair<int, int>, int> edges;
    for (int t : bad) {
      tris[t].alive = false;
      for (int e = 0; e < 3; ++e) {
        const int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        auto it = edges.find({b, a});
        if (it != edges.end()) {
          edges.erase(it);
        } else {
          edges[{a, b}] = 1;
        }
      }
    }
    for (const auto& [e, unused] : edges) tris.push_back(make_tri(p, e.first, e.second, i));
    if (tris.size() > 4 * bad.size() + 64 && tris.size() > 8 * static_cast<std::size_t>(i + 16)) {
      std::erase_if(tris, [](const Tri& t) { return !t.alive; });
    }
  }
  std::vector<std::array<int, 3>> out;
  for (const Tri& t : tris)
    if (t.alive && t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back(t.v);
  return out;
}

TriMesh square_with_disk(double half, Point2 center, double radius, double h) {
  if (!(half > 0) || !(radius > 0) || !(h > 0)) throw InputError("square_with_disk needs positive sizes");
  if (std::abs(center[0]) + radius >= half || std::abs(center[1]) + radius >= half)
    throw InputError("disk must lie strictly inside the square");
  TriMesh m;
  const int side = std::max(4, static_cast<int>(std::ceil(2 * half / h)));
  for (int s = 0; s < 4; ++s) {
    for (int j = 0; j < side; ++j) {
      const double a = -half + 2 * half * j / side;
      Point2 q;
      switch (s) {
        case 0: q = {a, -half}; break;
        case 1: q = {half, a}; break;
        case 2: q = {-a, half}; break;
        default: q = {-half, -a}; break;
      }
      m.outer.push_back(static_cast<int>(m.vertices.size()));
      m.vertices.push_back(q);
    }
  }
  const int ring = std::max(8, static_cast<int>(std::ceil(2 * std::numbers::pi * radius / h)));
  for (int j = 0; j < ring; ++j) {
    const double th = 2 * std::numbers::pi * j / ring;
    m.K.push_back(static_cast<int>(m.vertices.size()));
    m.vertices.push_back({center[0] + radius * std::cos(th), center[1] + radius * std::sin(th)});
  }
  std::mt19937 rng(20240611u);
  auto jitter = [&] { return (static_cast<double>(rng()) / 4294967296.0 - 0.5) * 0.1 * h; };
  const double gap = 0.7 * h;
  const double hy = h * std::sqrt(3.0) / 2;
  const int rows = static_cast<int>(std::floor(2 * half / hy));
  for (int r = 1; r < rows; ++r) {
    const double y = -half + r * hy;
    const double shift = (r % 2) ? 0.5 * h : 0.0;
    for (double x = -half + shift + h; x < half - 0.5 * h; x += h) {
      const Point2 q{x + jitter(), y + jitter()};
      if (half - std::abs(q[0]) < gap || half - std::abs(q[1]) < gap) continue;
      if (std::hypot(q[0] - center[0], q[1] - center[1]) < radius + gap) continue;
      m.vertices.push_back(q);
    }
  }
  for (const auto& t : delaunay(m.vertices)) {
    const double gx = (m.vertices[t[0]][0] + m.vertices[t[1]][0] + m.vertices[t[2]][0]) / 3;
    const double gy = (m.vertices[t[0]][1] + m.vertices[t[1]][1] + m.vertices[t[2]][1]) / 3;
    if (std::hypot(gx - center[0], gy - center[1]) < radius) continue;
    m.triangles.push_back(t);
  }
  m.circles.push_back({center, radius, true});
  m.validate();
  return m;
}

}  // namespace mincap
