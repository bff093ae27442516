#include "tsg/dispersion.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <string>

namespace tsg {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct FemGeometry {
  std::vector<std::array<double, 6>> grad;  // per triangle: gx0 gy0 gx1 gy1 gx2 gy2
  std::vector<double> lumped;               // nodal quadrature weights
};

FemGeometry precompute_geometry(const TriMesh& mesh) {
  FemGeometry g;
  g.lumped = mesh.lumped_weights();
  g.grad.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& a = mesh.vertices[tri[0]];
    const Point& b = mesh.vertices[tri[1]];
    const Point& c = mesh.vertices[tri[2]];
    const double inv2a = 1.0 / (2.0 * mesh.tri_area[t]);
    g.grad.push_back({(b[1] - c[1]) * inv2a, (c[0] - b[0]) * inv2a,
                      (c[1] - a[1]) * inv2a, (a[0] - c[0]) * inv2a,
                      (a[1] - b[1]) * inv2a, (b[0] - a[0]) * inv2a});
  }
  return g;
}

/// System matrix of one implicit Euler step,
///   S = M_lumped * (1 + kappa*dt) + dt * (K_mu + (C - D) + B_inflow),
/// where C is the Galerkin convection matrix, D the symmetric artificial
/// diffusion of discrete upwinding (off-diagonals of C - D nonpositive, row
/// sums preserved), and B the lumped Robin term on inflow edges. Diffusion
/// aside, S is an M-matrix, which keeps the update positivity-preserving.
SpMat assemble_system(const TriMesh& mesh, const FemGeometry& geo, const WindField& wind,
                      const PollutionParams& params, double dt, double t) {
  const int nv = mesh.n_vertices();
  std::vector<double> vx, vy;
  wind.eval(mesh, t, vx, vy);

  std::vector<Triplet> conv;
  conv.reserve(mesh.triangles.size() * 9);
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangles.size() * 18 + mesh.boundary_edges.size() * 2 +
                static_cast<std::size_t>(nv));

  for (std::size_t tIdx = 0; tIdx < mesh.triangles.size(); ++tIdx) {
    const auto& tri = mesh.triangles[tIdx];
    const auto& gr = geo.grad[tIdx];
    const double area = mesh.tri_area[tIdx];
    const double vbar_x = (vx[tri[0]] + vx[tri[1]] + vx[tri[2]]) / 3.0;
    const double vbar_y = (vy[tri[0]] + vy[tri[1]] + vy[tri[2]]) / 3.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double kij =
            params.mu * area * (gr[2 * i] * gr[2 * j] + gr[2 * i + 1] * gr[2 * j + 1]);
        if (kij != 0.0) trips.emplace_back(tri[i], tri[j], dt * kij);
        // int_T (v . grad phi_j) phi_i  with v averaged per triangle
        conv.emplace_back(tri[i], tri[j], area / 3.0 * (vbar_x * gr[2 * j] + vbar_y * gr[2 * j + 1]));
      }
    }
  }

  // Triangle assembly always creates the (i,j) and (j,i) slots together, so
  // the sparsity pattern of C is symmetric and coeff(j,i) is well defined.
  SpMat C(nv, nv);
  C.setFromTriplets(conv.begin(), conv.end());
  for (int col = 0; col < C.outerSize(); ++col) {
    for (SpMat::InnerIterator it(C, col); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = col;
      if (i == j) {
        trips.emplace_back(i, i, dt * it.value());
        continue;
      }
      const double d = std::max({it.value(), C.coeff(j, i), 0.0});
      trips.emplace_back(i, j, dt * (it.value() - d));
      trips.emplace_back(i, i, dt * d);
    }
  }

  for (const auto& be : mesh.boundary_edges) {
    const double mx = 0.5 * (vx[be.a] + vx[be.b]);
    const double my = 0.5 * (vy[be.a] + vy[be.b]);
    const double vn = mx * be.nx + my * be.ny;
    if (vn < 0.0) {  // inflow edge: coefficient -v.n > 0, lumped on endpoints
      trips.emplace_back(be.a, be.a, dt * (-vn) * be.length / 2.0);
      trips.emplace_back(be.b, be.b, dt * (-vn) * be.length / 2.0);
    }
  }

  const double mass_scale = 1.0 + params.kappa * dt;
  for (int j = 0; j < nv; ++j)
    trips.emplace_back(j, j, geo.lumped[static_cast<std::size_t>(j)] * mass_scale);

  SpMat S(nv, nv);
  S.setFromTriplets(trips.begin(), trips.end());
  S.makeCompressed();
  return S;
}

}  // namespace

std::vector<double> PollutionParams::phi0(const TriMesh& mesh) const {
  if (!phi0_nodal.empty()) {
    if (static_cast<int>(phi0_nodal.size()) != mesh.n_vertices())
      fail(ErrorKind::config, "phi0 nodal vector does not match the mesh");
    return phi0_nodal;
  }
  return std::vector<double>(static_cast<std::size_t>(mesh.n_vertices()), phi0_uniform);
}

void PollutionParams::check() const {
  if (mu < 0.0 || kappa < 0.0) fail(ErrorKind::validation, "mu and kappa must be nonnegative");
  if (phi0_uniform < 0.0) fail(ErrorKind::validation, "phi0 must be nonnegative");
  for (double v : phi0_nodal)
    if (v < 0.0) fail(ErrorKind::validation, "phi0 must be nonnegative");
}

std::vector<double> ScalarFieldSeries::time_average() const {
  if (values.empty()) return {};
  std::vector<double> avg(values.front().size(), 0.0);
  for (const auto& frame : values)
    for (std::size_t j = 0; j < frame.size(); ++j) avg[j] += frame[j];
  for (double& v : avg) v /= static_cast<double>(values.size());
  return avg;
}

RoadMeshMap build_road_mesh_map(const Network& net, const TriMesh& mesh,
                                const Discretization& disc) {
  RoadMeshMap map;
  map.n_vertices = mesh.n_vertices();
  map.cells.resize(net.roads.size());
  for (std::size_t i = 0; i < net.roads.size(); ++i) {
    const Road& r = net.roads[i];
    map.cells[i].resize(static_cast<std::size_t>(disc.cells[i]));
    for (int h = 0; h < disc.cells[i]; ++h) {
      Point p = r.position((h + 0.5) * disc.ds[i]);
      PointLocation loc = locate_point(mesh, p);
      if (loc.triangle < 0)
        fail(ErrorKind::config, "road " + std::to_string(r.id) + " cell " + std::to_string(h) +
                                    " midpoint lies outside the mesh");
      const auto& tri = mesh.triangles[static_cast<std::size_t>(loc.triangle)];
      map.cells[i][static_cast<std::size_t>(h)] = {loc.triangle, {tri[0], tri[1], tri[2]},
                                                   loc.bary};
    }
  }
  std::vector<int> boundary_vertices;
  {
    std::vector<bool> seen(mesh.vertices.size(), false);
    for (const auto& be : mesh.boundary_edges) {
      if (!seen[be.a]) boundary_vertices.push_back(be.a);
      if (!seen[be.b]) boundary_vertices.push_back(be.b);
      seen[be.a] = seen[be.b] = true;
    }
  }
  for (const BoundaryInflow& b : net.inflows) {
    Point p = net.road_by_id(b.road).start();
    int best = -1;
    double best_d = 1e300;
    for (int v : boundary_vertices) {
      double d = std::hypot(mesh.vertices[v][0] - p[0], mesh.vertices[v][1] - p[1]);
      if (d < best_d) {
        best_d = d;
        best = v;
      }
    }
    map.inflow_vertex.push_back(best);
  }
  return map;
}

LoadSeries assemble_emissions(const TrafficTrajectory& traj, const RoadMeshMap& map,
                              const Network& net, const Discretization& disc) {
  if (map.cells.size() != net.roads.size())
    fail(ErrorKind::config, "road/mesh map does not match the network");
  const int steps = traj.steps();
  LoadSeries loads(static_cast<std::size_t>(steps),
                   std::vector<double>(static_cast<std::size_t>(map.n_vertices), 0.0));
  for (int n = 1; n <= steps; ++n) {
    const TrafficState& s = traj.states[static_cast<std::size_t>(n)];
    auto& load = loads[static_cast<std::size_t>(n - 1)];
    for (std::size_t i = 0; i < net.roads.size(); ++i) {
      const Road& r = net.roads[i];
      for (std::size_t h = 0; h < map.cells[i].size(); ++h) {
        const double rho = s.rho[i][h];
        const double rate = disc.ds[i] * (r.gamma * r.fd.flux(rho) + r.eta * rho);
        if (rate == 0.0) continue;
        const auto& anchor = map.cells[i][h];
        for (int k = 0; k < 3; ++k)
          load[static_cast<std::size_t>(anchor.verts[k])] += anchor.bary[k] * rate;
      }
    }
  }
  return loads;
}

LoadSeries make_uniform_loads(const TriMesh& mesh, double rate, int steps) {
  std::vector<double> w = mesh.lumped_weights();
  std::vector<double> load(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) load[j] = rate * w[j];
  return LoadSeries(static_cast<std::size_t>(steps), load);
}

QueueSources build_queue_sources(const TrafficTrajectory& traj, const RoadMeshMap& map,
                                 const Network& net, const TriMesh& mesh, const WindField& wind,
                                 const Discretization& disc) {
  QueueSources qs;
  qs.vertex = map.inflow_vertex;
  const int steps = traj.steps();
  qs.active.resize(static_cast<std::size_t>(steps) + 1);
  for (int n = 0; n <= steps; ++n) {
    std::vector<bool> edge_inflow = classify_inflow_edges(mesh, wind, disc.time_at(n));
    auto& act = qs.active[static_cast<std::size_t>(n)];
    act.resize(net.inflows.size());
    for (std::size_t y = 0; y < net.inflows.size(); ++y)
      act[y] = vertex_on_inflow(mesh, edge_inflow, qs.vertex[y]);
  }
  qs.rate.resize(static_cast<std::size_t>(steps));
  for (int n = 1; n <= steps; ++n) {
    auto& r = qs.rate[static_cast<std::size_t>(n - 1)];
    r.resize(net.inflows.size(), 0.0);
    for (std::size_t y = 0; y < net.inflows.size(); ++y) {
      double q = traj.states[static_cast<std::size_t>(n)].q[y];
      r[y] = qs.active[static_cast<std::size_t>(n)][y] ? net.inflows[y].lambda_q * q : 0.0;
    }
  }
  return qs;
}

std::vector<bool> classify_inflow_edges(const TriMesh& mesh, const WindField& wind, double t) {
  std::vector<double> vx, vy;
  wind.eval(mesh, t, vx, vy);
  std::vector<bool> inflow(mesh.boundary_edges.size(), false);
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    const double mx = 0.5 * (vx[be.a] + vx[be.b]);
    const double my = 0.5 * (vy[be.a] + vy[be.b]);
    inflow[e] = mx * be.nx + my * be.ny < 0.0;  // ties classify as outflow
  }
  return inflow;
}

bool vertex_on_inflow(const TriMesh& mesh, const std::vector<bool>& edge_inflow, int vertex) {
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
    if (edge_inflow[e] &&
        (mesh.boundary_edges[e].a == vertex || mesh.boundary_edges[e].b == vertex))
      return true;
  return false;
}

ScalarFieldSeries solve_pollution(const TriMesh& mesh, const WindField& wind,
                                  const PollutionParams& params, const LoadSeries& emissions,
                                  const QueueSources& queue_sources, const Discretization& disc) {
  params.check();
  const int nv = mesh.n_vertices();
  const int sub = std::max(1, disc.substeps);
  const int steps = disc.steps * sub;
  const double dt = disc.dt / sub;
  if (!emissions.empty() && static_cast<int>(emissions.size()) != disc.steps)
    fail(ErrorKind::config, "emission series must have one load per traffic step");

  const FemGeometry geo = precompute_geometry(mesh);
  Eigen::VectorXd lumped(nv);
  for (int j = 0; j < nv; ++j) lumped[j] = geo.lumped[static_cast<std::size_t>(j)];

  ScalarFieldSeries out;
  out.dt = dt;
  out.values.reserve(static_cast<std::size_t>(steps) + 1);
  out.values.push_back(params.phi0(mesh));

  Eigen::VectorXd phi(nv);
  for (int j = 0; j < nv; ++j) phi[j] = out.values[0][static_cast<std::size_t>(j)];

  Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
  solver.setTolerance(1e-13);
  solver.setMaxIterations(8 * nv + 200);

  SpMat system;
  bool system_ready = false;
  for (int m = 0; m < steps; ++m) {
    const double t_next = (m + 1) * dt;
    const int traffic_step = m / sub;

    if (!system_ready || !wind.time_constant()) {
      system = assemble_system(mesh, geo, wind, params, dt, t_next);
      solver.compute(system);
      if (solver.info() != Eigen::Success)
        fail(ErrorKind::numeric, "transport solve: factorization setup failed");
      system_ready = true;
    }

    Eigen::VectorXd rhs = lumped.cwiseProduct(phi);
    if (!emissions.empty()) {
      const auto& load = emissions[static_cast<std::size_t>(traffic_step)];
      for (int j = 0; j < nv; ++j) rhs[j] += dt * load[static_cast<std::size_t>(j)];
    }
    if (!queue_sources.vertex.empty() && !queue_sources.rate.empty()) {
      const auto& rates = queue_sources.rate[static_cast<std::size_t>(traffic_step)];
      for (std::size_t y = 0; y < queue_sources.vertex.size(); ++y)
        rhs[queue_sources.vertex[y]] += dt * rates[y];
    }

    phi = solver.solveWithGuess(rhs, phi);
    if (solver.info() != Eigen::Success)
      fail(ErrorKind::numeric, "transport solve failed to converge at step " + std::to_string(m + 1));
    for (int j = 0; j < nv; ++j)
      if (!std::isfinite(phi[j]))
        fail(ErrorKind::numeric,
             "transport solve produced non-finite values at step " + std::to_string(m + 1));

    out.values.emplace_back(phi.data(), phi.data() + nv);
  }
  return out;
}

ScalarFieldSeries solve_adjoint(const TriMesh& mesh, const WindField& wind,
                                const PollutionParams& params, const Discretization& disc) {
  WindField reversed = wind.reversed(disc.horizon);
  PollutionParams p = params;
  p.phi0_uniform = 0.0;
  p.phi0_nodal.clear();
  const double rate = 1.0 / (disc.horizon * mesh.domain_area);
  LoadSeries loads = make_uniform_loads(mesh, rate, disc.steps);
  ScalarFieldSeries g = solve_pollution(mesh, reversed, p, loads, QueueSources{}, disc);
  std::reverse(g.values.begin(), g.values.end());
  return g;
}

RoadCellSeries eval_on_roads(const ScalarFieldSeries& field, const RoadMeshMap& map) {
  RoadCellSeries out(field.values.size());
  for (std::size_t n = 0; n < field.values.size(); ++n) {
    const auto& nodal = field.values[n];
    out[n].resize(map.cells.size());
    for (std::size_t i = 0; i < map.cells.size(); ++i) {
      out[n][i].resize(map.cells[i].size());
      for (std::size_t h = 0; h < map.cells[i].size(); ++h) {
        const auto& a = map.cells[i][h];
        out[n][i][h] = a.bary[0] * nodal[static_cast<std::size_t>(a.verts[0])] +
                       a.bary[1] * nodal[static_cast<std::size_t>(a.verts[1])] +
                       a.bary[2] * nodal[static_cast<std::size_t>(a.verts[2])];
      }
    }
  }
  return out;
}

}  // namespace tsg
