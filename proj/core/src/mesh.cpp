#include "mincap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "mincap/error.hpp"

namespace mincap {
namespace {

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

void orient_ccw(const std::vector<Point2>& v, std::array<int, 3>& t) {
  if (signed_area(v[t[0]], v[t[1]], v[t[2]]) < 0) std::swap(t[1], t[2]);
}

}  // namespace

double TriMesh::triangle_area(std::size_t tri) const {
  const auto& t = triangles[tri];
  return signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
}

std::vector<TriMesh::Edge> TriMesh::boundary_edges() const {
  std::map<std::pair<int, int>, std::pair<int, Edge>> count;
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& t = triangles[i];
    for (int e = 0; e < 3; ++e) {
      const int a = t[e];
      const int b = t[(e + 1) % 3];
      auto& slot = count[key(a, b)];
      ++slot.first;
      slot.second = Edge{a, b, static_cast<int>(i)};
    }
  }
  std::vector<Edge> out;
  for (const auto& [k, v] : count)
    if (v.first == 1) out.push_back(v.second);
  return out;
}

void TriMesh::validate(bool require_capacity_tags) const {
  const int nv = static_cast<int>(vertices.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    for (int x : triangles[i])
      if (x < 0 || x >= nv) throw InputError("triangle " + std::to_string(i) + " has an invalid vertex index");
    const double A = triangle_area(i);
    if (!(A > 1e-14)) throw InputError("triangle " + std::to_string(i) + " is degenerate or clockwise");
  }
  std::set<int> boundary;
  for (const Edge& e : boundary_edges()) {
    boundary.insert(e.a);
    boundary.insert(e.b);
  }
  std::set<int> k_set(K.begin(), K.end());
  for (int v : K)
    if (!boundary.count(v)) throw InputError("K vertex " + std::to_string(v) + " is not on the boundary");
  for (int v : outer) {
    if (!boundary.count(v)) throw InputError("outer vertex " + std::to_string(v) + " is not on the boundary");
    if (k_set.count(v)) throw InputError("vertex " + std::to_string(v) + " is tagged both K and outer");
  }
  if (require_capacity_tags && (K.empty() || outer.empty()))
    throw InputError("capacity problems need nonempty K and outer tags");
}

TriMesh polar_annulus(double r_inner, double r_outer, int rings, int sectors) {
  if (!(r_inner > 0) || !(r_outer > r_inner)) throw InputError("annulus needs 0 < r_inner < r_outer");
  if (rings < 1 || sectors < 3) throw InputError("annulus needs rings >= 1 and sectors >= 3");
  TriMesh m;
  const double ratio = r_outer / r_inner;
  for (int i = 0; i <= rings; ++i) {
    const double r = i == rings ? r_outer : r_inner * std::pow(ratio, static_cast<double>(i) / rings);
    for (int j = 0; j < sectors; ++j) {
      const double th = 2 * std::numbers::pi * j / sectors;
      m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  auto id = [sectors](int i, int j) { return i * sectors + (j % sectors); };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < sectors; ++j) {
      std::array<int, 3> t1{id(i, j), id(i + 1, j), id(i + 1, j + 1)};
      std::array<int, 3> t2{id(i, j), id(i + 1, j + 1), id(i, j + 1)};
      orient_ccw(m.vertices, t1);
      orient_ccw(m.vertices, t2);
      m.triangles.push_back(t1);
      m.triangles.push_back(t2);
    }
  }
  for (int j = 0; j < sectors; ++j) {
    m.K.push_back(id(0, j));
    m.outer.push_back(id(rings, j));
  }
  m.circles.push_back({{0, 0}, r_inner, true});
  m.circles.push_back({{0, 0}, r_outer, false});
  return m;
}

TriMesh refine(const TriMesh& mesh) {
  TriMesh out;
  out.vertices = mesh.vertices;
  out.circles = mesh.circles;
  std::set<int> k_set(mesh.K.begin(), mesh.K.end());
  std::set<int> o_set(mesh.outer.begin(), mesh.outer.end());
  std::set<std::pair<int, int>> boundary;
  for (const auto& e : mesh.boundary_edges()) boundary.insert(key(e.a, e.b));

  std::map<std::pair<int, int>, int> mid;
  out.K = mesh.K;
  out.outer = mesh.outer;
  auto midpoint = [&](int a, int b) {
    const auto k = key(a, b);
    if (auto it = mid.find(k); it != mid.end()) return it->second;
    Point2 p{0.5 * (mesh.vertices[a][0] + mesh.vertices[b][0]), 0.5 * (mesh.vertices[a][1] + mesh.vertices[b][1])};
    const bool on_boundary = boundary.count(k) > 0;
    if (on_boundary) {
      for (const BoundaryCircle& c : mesh.circles) {
        auto on = [&](const Point2& q) {
          return std::abs(std::hypot(q[0] - c.center[0], q[1] - c.center[1]) - c.radius) < 1e-9 * c.radius;
        };
        if (on(mesh.vertices[a]) && on(mesh.vertices[b])) {
          const double d = std::hypot(p[0] - c.center[0], p[1] - c.center[1]);
          p = {c.center[0] + (p[0] - c.center[0]) * c.radius / d, c.center[1] + (p[1] - c.center[1]) * c.radius / d};
          break;
        }
      }
    }
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    if (on_boundary && k_set.count(a) && k_set.count(b)) out.K.push_back(id);
    if (on_boundary && o_set.count(a) && o_set.count(b)) out.outer.push_back(id);
    mid.emplace(k, id);
    return id;
  };
  for (const auto& t : mesh.triangles) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  return out;
}

void write_off(std::ostream& out, const TriMesh& mesh) {
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << " 0\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

TriMesh read_off(std::istream& in) {
  std::stringstream clean;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    clean << line << '\n';
  }
  std::string magic;
  clean >> magic;
  if (magic != "OFF") throw InputError("mesh file does not start with OFF");
  std::size_t nv = 0, nf = 0, ne = 0;
  if (!(clean >> nv >> nf >> ne)) throw InputError("malformed OFF header");
  TriMesh m;
  m.vertices.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    double z;
    if (!(clean >> m.vertices[i][0] >> m.vertices[i][1] >> z)) throw InputError("malformed OFF vertex");
  }
  for (std::size_t i = 0; i < nf; ++i) {
    int k;
    std::array<int, 3> t;
    if (!(clean >> k >> t[0] >> t[1] >> t[2]) || k != 3) throw InputError("OFF faces must be triangles");
    m.triangles.push_back(t);
  }
  return m;
}

nlohmann::json tags_json(const TriMesh& mesh) {
  nlohmann::json j{{"K", mesh.K}, {"outer", mesh.outer}};
  if (!mesh.circles.empty()) {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : mesh.circles)
      cs.push_back({{"center", {c.center[0], c.center[1]}}, {"radius", c.radius}, {"tag", c.is_K ? "K" : "outer"}});
    j["circles"] = cs;
  }
  return j;
}

void apply_tags(TriMesh& mesh, const nlohmann::json& tags) {
  try {
    mesh.K = tags.at("K").get<std::vector<int>>();
    mesh.outer = tags.at("outer").get<std::vector<int>>();
    mesh.circles.clear();
    if (tags.contains("circles")) {
      for (const auto& c : tags.at("circles")) {
        BoundaryCircle bc;
        bc.center = {c.at("center").at(0).get<double>(), c.at("center").at(1).get<double>()};
        bc.radius = c.at("radius").get<double>();
        bc.is_K = c.value("tag", "outer") == "K";
        mesh.circles.push_back(bc);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tag file: ") + e.what());
  }
}

TriMesh load_mesh(const std::string& off_path, const std::string& tags_path) {
  std::ifstream off(off_path);
  if (!off) throw InputError("cannot open mesh file " + off_path);
  TriMesh m = read_off(off);
  std::ifstream tags(tags_path);
  if (!tags) throw InputError("cannot open tag file " + tags_path);
  nlohmann::json j;
  try {
    tags >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tag file: ") + e.what());
  }
  apply_tags(m, j);
  m.validate();
  return m;
}

}  // namespace mincap
