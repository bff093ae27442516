#include "tsg/functionals.hpp"

#include <cmath>
#include <string>

namespace tsg {

FunctionalWeights FunctionalWeights::from_network(const Network& net) {
  FunctionalWeights w;
  for (const Road& r : net.roads) w.eps_density.push_back(r.eps_density);
  for (const BoundaryInflow& b : net.inflows) w.eps_queue.push_back(b.eps_queue);
  for (const BoundaryOutflow& b : net.outflows) w.eps_out.push_back(b.eps_out);
  return w;
}

void FunctionalWeights::check(const Network& net) const {
  if (eps_density.size() != net.roads.size() || eps_queue.size() != net.inflows.size() ||
      eps_out.size() != net.outflows.size())
    fail(ErrorKind::config, "functional weights do not cover the network");
  for (double v : eps_density)
    if (v < 0.0) fail(ErrorKind::config, "eps_density must be nonnegative");
  for (double v : eps_queue)
    if (v < 0.0) fail(ErrorKind::config, "eps_queue must be nonnegative");
  for (double v : eps_out)
    if (v < 0.0) fail(ErrorKind::config, "eps_out must be nonnegative");
}

double eval_JT(const TrafficTrajectory& traj, const FunctionalWeights& weights,
               const Network& net, const Discretization& disc) {
  weights.check(net);
  const int n_states = static_cast<int>(traj.states.size());
  double total = 0.0;
  for (int n = 0; n < n_states; ++n) {
    const TrafficState& s = traj.states[static_cast<std::size_t>(n)];
    double term = 0.0;
    for (std::size_t y = 0; y < net.inflows.size(); ++y) term += weights.eps_queue[y] * s.q[y];
    for (std::size_t i = 0; i < net.roads.size(); ++i) {
      double cell_sum = 0.0;
      for (double rho : s.rho[i]) cell_sum += rho;
      term += weights.eps_density[i] * disc.ds[i] * cell_sum;
    }
    for (std::size_t z = 0; z < net.outflows.size(); ++z) {
      int i = net.road_index(net.outflows[z].road);
      const Road& r = net.roads[static_cast<std::size_t>(i)];
      term -= weights.eps_out[z] * r.fd.flux(s.rho[static_cast<std::size_t>(i)].back());
    }
    total += term;
  }
  double jt = disc.dt * total;
  if (!std::isfinite(jt)) fail(ErrorKind::numeric, "J_T evaluated to a non-finite value");
  return jt;
}

AdjointEvaluation finish_adjoint(ScalarFieldSeries g, const Network& net, const TriMesh& mesh,
                                 const WindField& wind, const RoadMeshMap& map,
                                 const Discretization& disc) {
  AdjointEvaluation adj;
  adj.g = std::move(g);
  adj.g_on_roads = eval_on_roads(adj.g, map);
  adj.inflow_active.resize(static_cast<std::size_t>(disc.steps) + 1);
  for (int n = 0; n <= disc.steps; ++n) {
    std::vector<bool> edge_inflow = classify_inflow_edges(mesh, wind, disc.time_at(n));
    auto& act = adj.inflow_active[static_cast<std::size_t>(n)];
    act.resize(net.inflows.size());
    for (std::size_t y = 0; y < net.inflows.size(); ++y)
      act[y] = vertex_on_inflow(mesh, edge_inflow, map.inflow_vertex[y]);
  }
  return adj;
}

AdjointEvaluation prepare_adjoint(const Network& net, const TriMesh& mesh, const WindField& wind,
                                  const PollutionParams& params, const RoadMeshMap& map,
                                  const Discretization& disc) {
  return finish_adjoint(solve_adjoint(mesh, wind, params, disc), net, mesh, wind, map, disc);
}

double eval_JP_adjoint(const TrafficTrajectory& traj, const AdjointEvaluation& adj,
                       const Network& net, const PollutionParams& params, const TriMesh& mesh,
                       const Discretization& disc) {
  const int steps = traj.steps();
  if (static_cast<int>(adj.g_on_roads.size()) != steps + 1)
    fail(ErrorKind::config, "adjoint series does not match the trajectory time grid");

  // Emission term; the arc-length parametrization makes ||sigma'|| = 1.
  double emission_term = 0.0;
  for (int n = 1; n <= steps; ++n) {
    const TrafficState& s = traj.states[static_cast<std::size_t>(n)];
    const auto& g_roads = adj.g_on_roads[static_cast<std::size_t>(n)];
    for (std::size_t i = 0; i < net.roads.size(); ++i) {
      const Road& r = net.roads[i];
      double road_sum = 0.0;
      for (std::size_t h = 0; h < s.rho[i].size(); ++h) {
        double rho = s.rho[i][h];
        road_sum += (r.gamma * r.fd.flux(rho) + r.eta * rho) * g_roads[i][h];
      }
      emission_term += disc.ds[i] * road_sum;
    }
  }
  emission_term *= disc.dt;

  // Queue boundary term, as printed (no dt factor).
  double queue_term = 0.0;
  for (int n = 1; n <= steps; ++n) {
    const TrafficState& s = traj.states[static_cast<std::size_t>(n)];
    const auto& g_roads = adj.g_on_roads[static_cast<std::size_t>(n)];
    for (std::size_t y = 0; y < net.inflows.size(); ++y) {
      if (!adj.inflow_active[static_cast<std::size_t>(n)][y]) continue;
      int i = net.road_index(net.inflows[y].road);
      queue_term += net.inflows[y].lambda_q * s.q[y] * g_roads[static_cast<std::size_t>(i)].front();
    }
  }

  // Initial-condition term with the (1/3) sum |T| nodal rule.
  double ic_term = 0.0;
  std::vector<double> phi0 = params.phi0(mesh);
  std::vector<double> w = mesh.lumped_weights();
  const auto& g0 = adj.g.values.front();
  for (std::size_t j = 0; j < w.size(); ++j) ic_term += w[j] * phi0[j] * g0[j];

  double jp = emission_term + queue_term + ic_term;
  if (!std::isfinite(jp)) fail(ErrorKind::numeric, "J_P evaluated to a non-finite value");
  return jp;
}

double eval_JP_direct(const ScalarFieldSeries& phi, const TriMesh& mesh) {
  if (phi.values.empty()) fail(ErrorKind::config, "empty concentration series");
  const int steps = phi.steps();
  const double horizon = steps * phi.dt;
  if (!(horizon > 0.0)) fail(ErrorKind::config, "concentration series spans zero time");
  std::vector<double> w = mesh.lumped_weights();
  double integral = 0.0;
  for (int n = 0; n <= steps; ++n) {
    const auto& frame = phi.values[static_cast<std::size_t>(n)];
    double space = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) space += w[j] * frame[j];
    const double theta = (n == 0 || n == steps) ? 0.5 : 1.0;
    integral += theta * phi.dt * space;
  }
  return integral / (horizon * mesh.domain_area);
}

}  // namespace tsg
