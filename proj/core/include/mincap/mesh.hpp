#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mincap {

using Point2 = std::array<double, 2>;

/// Circle carrying a boundary tag; refinement projects new boundary midpoints onto it.
struct BoundaryCircle {
  Point2 center{0, 0};
  double radius = 0;
  bool is_K = false;
};

/// Flat 2-D triangulation of the closure of Omega minus K with boundary tags.
struct TriMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> K;                         // vertices carrying u = t (or its trace penalty)
  std::vector<int> outer;                     // vertices carrying u = 0 (or its trace penalty)
  std::vector<BoundaryCircle> circles;        // optional geometry hints

  double triangle_area(std::size_t tri) const;
  /// Boundary edges (a, b, triangle) oriented as in their triangle.
  struct Edge {
    int a;
    int b;
    int triangle;
  };
  std::vector<Edge> boundary_edges() const;
  /// Throws InputError on degenerate or clockwise triangles, out-of-range
  /// indices, or tagged vertices off the topological boundary.
  void validate(bool require_capacity_tags = true) const;
};

/// Polar mesh of r_inner <= |x| <= r_outer with log-spaced rings.
TriMesh polar_annulus(double r_inner, double r_outer, int rings, int sectors);

/// Delaunay mesh of the square [-half, half]^2 minus the open disk |x - c| < radius,
/// target edge length h.
TriMesh square_with_disk(double half, Point2 center, double radius, double h);

/// Splits every triangle into four; boundary midpoints on circles are projected.
TriMesh refine(const TriMesh& mesh);

/// Bowyer-Watson Delaunay triangulation of a point set (counterclockwise output).
std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& points);

void write_off(std::ostream& out, const TriMesh& mesh);
TriMesh read_off(std::istream& in);
nlohmann::json tags_json(const TriMesh& mesh);
void apply_tags(TriMesh& mesh, const nlohmann::json& tags);
TriMesh load_mesh(const std::string& off_path, const std::string& tags_path);

}  // namespace mincap
