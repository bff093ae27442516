#pragma once

#include <vector>

#include "tsg/discretization.hpp"
#include "tsg/mesh.hpp"
#include "tsg/network.hpp"
#include "tsg/traffic.hpp"
#include "tsg/wind.hpp"

namespace tsg {

struct PollutionParams {
  double mu = 3.5e-8;   // molecular diffusion, km^2/h
  double kappa = 6e-3;  // extinction rate, 1/h
  /// Initial concentration: uniform value, or nodal when phi0_nodal is set.
  double phi0_uniform = 0.0;
  std::vector<double> phi0_nodal;  // kg/km^2, one per vertex when nonempty

  std::vector<double> phi0(const TriMesh& mesh) const;
  void check() const;
};

/// Nodal field per time step (length steps+1).
struct ScalarFieldSeries {
  std::vector<std::vector<double>> values;  // [step][vertex]
  double dt = 0.0;

  int steps() const { return static_cast<int>(values.size()) - 1; }
  std::vector<double> time_average() const;
};

/// Precomputed geometry link between road cells and the mesh: containing
/// triangle and barycentric weights per cell midpoint, plus the boundary
/// vertex closest to each inflow entry point.
struct RoadMeshMap {
  struct CellAnchor {
    int triangle = -1;
    std::array<int, 3> verts{0, 0, 0};          // triangle vertex indices
    std::array<double, 3> bary{0.0, 0.0, 0.0};  // nonnegative, sums to one
  };
  std::vector<std::vector<CellAnchor>> cells;  // [road][cell]
  std::vector<int> inflow_vertex;              // nearest boundary vertex per inflow
  int n_vertices = 0;                          // of the mesh it was built on
};

RoadMeshMap build_road_mesh_map(const Network& net, const TriMesh& mesh,
                                const Discretization& disc);

/// Integrated P1 load vectors, one per time step (length steps); loads[n]
/// acts over (t^n, t^{n+1}].
using LoadSeries = std::vector<std::vector<double>>;

/// Distributes each cell's emission rate ds*(gamma*f(rho) + eta*rho) onto
/// its triangle's vertices with barycentric weights. The nodal sum equals
/// the midpoint-rule line integral exactly. Uses the trajectory states at
/// t^1..t^N.
LoadSeries assemble_emissions(const TrafficTrajectory& traj, const RoadMeshMap& map,
                              const Network& net, const Discretization& disc);

/// Uniform source rate (per unit area) as an integrated load series.
LoadSeries make_uniform_loads(const TriMesh& mesh, double rate, int steps);

/// Queue point sources lumped onto the nearest boundary vertex, active only
/// while that vertex touches an inflow-classified boundary edge.
struct QueueSources {
  std::vector<int> vertex;                  // per inflow
  std::vector<std::vector<double>> rate;    // [step][inflow], kg/h (lambda * q at t^{n+1})
  std::vector<std::vector<bool>> active;    // [step+1][inflow]: vertex on S^- at t^n
};

QueueSources build_queue_sources(const TrafficTrajectory& traj, const RoadMeshMap& map,
                                 const Network& net, const TriMesh& mesh, const WindField& wind,
                                 const Discretization& disc);

/// Boundary-edge classification at time t: true = inflow (v.n < 0 at the
/// edge midpoint), false = outflow (v.n >= 0, ties included).
std::vector<bool> classify_inflow_edges(const TriMesh& mesh, const WindField& wind, double t);
/// True when any boundary edge adjacent to the vertex classifies as inflow.
bool vertex_on_inflow(const TriMesh& mesh, const std::vector<bool>& edge_inflow, int vertex);

/// P1 / lumped-mass / implicit-Euler transport solve of the pollutant
/// equation with upwind-stabilized advection and the inflow Robin term.
/// Returns the nodal concentration at every step (values[0] = phi0).
ScalarFieldSeries solve_pollution(const TriMesh& mesh, const WindField& wind,
                                  const PollutionParams& params, const LoadSeries& emissions,
                                  const QueueSources& queue_sources, const Discretization& disc);

/// Adjoint final-value problem, solved forward in reversed time with the
/// negated wind (same machinery as solve_pollution), then flipped back.
/// g(.,T) = 0 exactly; independent of any trajectory.
ScalarFieldSeries solve_adjoint(const TriMesh& mesh, const WindField& wind,
                                const PollutionParams& params, const Discretization& disc);

/// Per-step per-road-cell interpolated values of a nodal field.
using RoadCellSeries = std::vector<std::vector<std::vector<double>>>;

RoadCellSeries eval_on_roads(const ScalarFieldSeries& field, const RoadMeshMap& map);

}  // namespace tsg
