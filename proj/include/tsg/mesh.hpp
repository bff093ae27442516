#pragma once

#include <array>
#include <string>
#include <vector>

#include "tsg/common.hpp"
#include "tsg/network.hpp"

namespace tsg {

/// Conforming triangulation of the city domain. Triangles are stored with
/// counter-clockwise winding (normalized at load); boundary edges are the
/// edges owned by exactly one triangle and carry the outward unit normal.
struct TriMesh {
  std::vector<Point> vertices;                 // km
  std::vector<std::array<int, 3>> triangles;   // CCW vertex indices
  std::vector<double> tri_area;                // km^2
  struct BoundaryEdge {
    int a = 0, b = 0;        // vertex indices
    double nx = 0.0, ny = 0.0;  // outward unit normal
    double length = 0.0;     // km
  };
  std::vector<BoundaryEdge> boundary_edges;
  double domain_area = 0.0;  // km^2, sum of triangle areas

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }

  /// Lumped P1 quadrature weights: w_j = sum of adjacent areas / 3;
  /// sum w_j = domain_area.
  std::vector<double> lumped_weights() const;

  /// Finalizes derived data (areas, winding, boundary, checks). Throws on a
  /// non-conforming or degenerate triangulation.
  void finalize();
};

/// Plain-text format: `nv nt nbe` header, nv `x y` lines, nt `a b c`
/// triangle lines, nbe `a b` boundary edge lines (1-based; nbe may be 0,
/// boundary edges are derived either way). Lines starting with # are
/// comments.
TriMesh load_mesh_text(const std::string& path);

/// Gmsh 2.2 ASCII importer (element type 2 = triangles; other elements are
/// ignored).
TriMesh load_mesh_gmsh(const std::string& path);

/// Dispatch on extension: .msh goes to the Gmsh importer.
TriMesh load_mesh(const std::string& path);

void save_mesh_text(const TriMesh& mesh, const std::string& path);

/// Structured triangulation of [x0,x1] x [y0,y1] with nx*ny quads split
/// into two triangles each.
TriMesh make_rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny);

/// Regular (red) refinement: every triangle splits into four via edge
/// midpoints.
TriMesh refine_uniform(const TriMesh& mesh);

/// Barycentric location of a point; used by the road/mesh map.
struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{0.0, 0.0, 0.0};
};

/// Brute-force point location with a signed-area tolerance of 1e-9 (scaled
/// by triangle size). Barycentric coordinates are clamped nonnegative and
/// renormalized to sum to one. triangle = -1 when the point is outside.
PointLocation locate_point(const TriMesh& mesh, const Point& p);

}  // namespace tsg
