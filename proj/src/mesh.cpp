#include "tsg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tsg {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

std::istream& next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return in;
  }
  return in;
}

}  // namespace

void TriMesh::finalize() {
  tri_area.clear();
  boundary_edges.clear();
  domain_area = 0.0;
  const int nv = n_vertices();
  for (auto& t : triangles) {
    for (int v : t)
      if (v < 0 || v >= nv) fail(ErrorKind::validation, "mesh: triangle vertex index out of range");
    double area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    if (area < 0.0) {  // normalize winding to CCW
      std::swap(t[1], t[2]);
      area = -area;
    }
    if (!(area > 0.0)) fail(ErrorKind::validation, "mesh: degenerate triangle");
    tri_area.push_back(area);
    domain_area += area;
  }

  // Edge ownership count; boundary edges belong to exactly one triangle.
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // key -> (count, opposite vertex)
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3], opp = t[(e + 2) % 3];
      auto key = std::minmax(a, b);
      auto [it, inserted] = edges.try_emplace({key.first, key.second}, 0, opp);
      it->second.first++;
      if (inserted) it->second.second = opp;
      // keep orientation info through the CCW triangle: store (a, b, opp)
      if (it->second.first > 2) fail(ErrorKind::validation, "mesh: edge shared by >2 triangles");
    }
  }
  // Rebuild boundary edges with correct orientation: walk triangles again so
  // the edge direction follows the owning triangle's CCW order, which puts
  // the domain on the left and the outward normal to the right.
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      auto key = std::minmax(a, b);
      if (edges.at({key.first, key.second}).first != 1) continue;
      BoundaryEdge be;
      be.a = a;
      be.b = b;
      double dx = vertices[b][0] - vertices[a][0];
      double dy = vertices[b][1] - vertices[a][1];
      be.length = std::hypot(dx, dy);
      be.nx = dy / be.length;
      be.ny = -dx / be.length;
      boundary_edges.push_back(be);
    }
  }

  // Closed-loop check: every boundary vertex has exactly two boundary edges.
  std::map<int, int> degree;
  for (const auto& be : boundary_edges) {
    degree[be.a]++;
    degree[be.b]++;
  }
  for (auto [v, d] : degree)
    if (d != 2)
      fail(ErrorKind::validation,
           "mesh: boundary is not a closed loop at vertex " + std::to_string(v));

  // Cross-check area: shoelace over oriented boundary edges equals the
  // triangle-area sum for a conforming mesh.
  double shoelace = 0.0;
  for (const auto& be : boundary_edges)
    shoelace += 0.5 * (vertices[be.a][0] * vertices[be.b][1] - vertices[be.b][0] * vertices[be.a][1]);
  if (std::abs(shoelace - domain_area) > 1e-10 * std::max(1.0, domain_area))
    fail(ErrorKind::validation, "mesh: boundary loop area disagrees with triangle areas");
}

std::vector<double> TriMesh::lumped_weights() const {
  std::vector<double> w(vertices.size(), 0.0);
  for (std::size_t t = 0; t < triangles.size(); ++t)
    for (int v : triangles[t]) w[static_cast<std::size_t>(v)] += tri_area[t] / 3.0;
  return w;
}

TriMesh load_mesh_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open mesh file " + path);
  std::string line;
  if (!next_data_line(in, line)) fail(ErrorKind::io, "mesh file " + path + " is empty");
  std::istringstream head(line);
  int nv = 0, nt = 0, nbe = 0;
  if (!(head >> nv >> nt >> nbe) || nv < 3 || nt < 1)
    fail(ErrorKind::io, "mesh file " + path + ": bad header");
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    if (!next_data_line(in, line)) fail(ErrorKind::io, "mesh file " + path + ": missing vertices");
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) fail(ErrorKind::io, "mesh file " + path + ": bad vertex line");
    mesh.vertices.push_back({x, y});
  }
  for (int i = 0; i < nt; ++i) {
    if (!next_data_line(in, line)) fail(ErrorKind::io, "mesh file " + path + ": missing triangles");
    std::istringstream ls(line);
    int a, b, c;
    if (!(ls >> a >> b >> c)) fail(ErrorKind::io, "mesh file " + path + ": bad triangle line");
    mesh.triangles.push_back({a - 1, b - 1, c - 1});
  }
  // Listed boundary edges are advisory; derived ones are authoritative.
  mesh.finalize();
  return mesh;
}

TriMesh load_mesh_gmsh(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open mesh file " + path);
  TriMesh mesh;
  std::string line;
  std::map<long, int> node_index;
  while (std::getline(in, line)) {
    if (line.rfind("$Nodes", 0) == 0) {
      std::getline(in, line);
      long n = std::stol(line);
      for (long i = 0; i < n; ++i) {
        std::getline(in, line);
        std::istringstream ls(line);
        long id;
        double x, y, z;
        if (!(ls >> id >> x >> y >> z)) fail(ErrorKind::io, "gmsh: bad node line");
        node_index[id] = mesh.n_vertices();
        mesh.vertices.push_back({x, y});
      }
    } else if (line.rfind("$Elements", 0) == 0) {
      std::getline(in, line);
      long n = std::stol(line);
      for (long i = 0; i < n; ++i) {
        std::getline(in, line);
        std::istringstream ls(line);
        long id;
        int type, ntags;
        if (!(ls >> id >> type >> ntags)) fail(ErrorKind::io, "gmsh: bad element line");
        long tag;
        for (int k = 0; k < ntags; ++k) ls >> tag;
        if (type == 2) {
          long a, b, c;
          if (!(ls >> a >> b >> c)) fail(ErrorKind::io, "gmsh: bad triangle element");
          mesh.triangles.push_back({node_index.at(a), node_index.at(b), node_index.at(c)});
        }
        // lines (type 1) and points (type 15) are ignored; the boundary is derived
      }
    }
  }
  if (mesh.triangles.empty()) fail(ErrorKind::io, "gmsh: no triangles in " + path);
  mesh.finalize();
  return mesh;
}

TriMesh load_mesh(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".msh") == 0)
    return load_mesh_gmsh(path);
  return load_mesh_text(path);
}

void save_mesh_text(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write mesh file " + path);
  out << mesh.n_vertices() << " " << mesh.n_triangles() << " " << mesh.boundary_edges.size()
      << "\n";
  for (const auto& v : mesh.vertices) out << format_double(v[0]) << " " << format_double(v[1]) << "\n";
  for (const auto& t : mesh.triangles) out << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  for (const auto& e : mesh.boundary_edges) out << e.a + 1 << " " << e.b + 1 << "\n";
}

TriMesh make_rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1) fail(ErrorKind::config, "rect mesh needs nx, ny >= 1");
  TriMesh mesh;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  mesh.finalize();
  return mesh;
}

TriMesh refine_uniform(const TriMesh& mesh) {
  TriMesh fine;
  fine.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find({key.first, key.second});
    if (it != midpoint.end()) return it->second;
    int idx = fine.n_vertices();
    fine.vertices.push_back({0.5 * (mesh.vertices[a][0] + mesh.vertices[b][0]),
                             0.5 * (mesh.vertices[a][1] + mesh.vertices[b][1])});
    midpoint[{key.first, key.second}] = idx;
    return idx;
  };
  for (const auto& t : mesh.triangles) {
    int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    fine.triangles.push_back({t[0], ab, ca});
    fine.triangles.push_back({ab, t[1], bc});
    fine.triangles.push_back({ca, bc, t[2]});
    fine.triangles.push_back({ab, bc, ca});
  }
  fine.finalize();
  return fine;
}

PointLocation locate_point(const TriMesh& mesh, const Point& p) {
  PointLocation best;
  double best_min_bary = -1e30;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Point& a = mesh.vertices[tri[0]];
    const Point& b = mesh.vertices[tri[1]];
    const Point& c = mesh.vertices[tri[2]];
    double area = mesh.tri_area[static_cast<std::size_t>(t)];
    double la = signed_area(p, b, c) / area;
    double lb = signed_area(a, p, c) / area;
    double lc = signed_area(a, b, p) / area;
    double min_bary = std::min({la, lb, lc});
    if (min_bary > best_min_bary) {
      best_min_bary = min_bary;
      best.triangle = t;
      best.bary = {la, lb, lc};
    }
  }
  if (best_min_bary < -1e-9) {
    best.triangle = -1;
    return best;
  }
  double sum = 0.0;
  for (double& l : best.bary) {
    l = std::max(l, 0.0);
    sum += l;
  }
  for (double& l : best.bary) l /= sum;
  return best;
}

}  // namespace tsg
