#pragma once

#include "tsg/dispersion.hpp"
#include "tsg/traffic.hpp"

namespace tsg {

/// Decision-maker weights of the travel-cost functional; indexed like the
/// network's road / inflow / outflow lists.
struct FunctionalWeights {
  std::vector<double> eps_density;  // per road
  std::vector<double> eps_queue;    // per inflow
  std::vector<double> eps_out;      // per outflow

  static FunctionalWeights from_network(const Network& net);
  void check(const Network& net) const;
};

/// Full-discrete travel cost
///   J_T = dt * sum_{n=0..N} ( sum_y eps_q q^n_y
///                           + sum_i eps_i ds_i sum_h rho^n_{i,h}
///                           - sum_z eps_out f_z(rho^n_{z,last}) ).
/// The outflow reward applies the static relation to the last-cell density,
/// exactly as the discrete formula states.
double eval_JT(const TrafficTrajectory& traj, const FunctionalWeights& weights,
               const Network& net, const Discretization& disc);

/// Adjoint data computed once per scenario and reused across candidate
/// controls.
struct AdjointEvaluation {
  ScalarFieldSeries g;              // nodal adjoint, g[N] = 0
  RoadCellSeries g_on_roads;        // interpolated at road cell midpoints
  std::vector<std::vector<bool>> inflow_active;  // [step][inflow]: entry on S^-
};

AdjointEvaluation prepare_adjoint(const Network& net, const TriMesh& mesh, const WindField& wind,
                                  const PollutionParams& params, const RoadMeshMap& map,
                                  const Discretization& disc);

/// Builds the derived pieces (road interpolation, inflow activity) around an
/// adjoint field that was solved elsewhere, e.g. loaded from a cache.
AdjointEvaluation finish_adjoint(ScalarFieldSeries g, const Network& net, const TriMesh& mesh,
                                 const WindField& wind, const RoadMeshMap& map,
                                 const Discretization& disc);

/// Adjoint form of the mean-pollution cost:
///   dt * sum_{n=1..N} sum_i sum_h ds_i (gamma_i f_i + eta_i rho) g^n(cell)
///   + sum_{n=1..N} sum_{y on S^-} lambda_y q^n_y g^n(first cell of road y)
///   + sum_j w_j phi0_j g^0_j.
/// The queue term follows the printed discrete formula, which carries no dt
/// factor (see the docs for the discrepancy note against the time-integral
/// form).
double eval_JP_adjoint(const TrafficTrajectory& traj, const AdjointEvaluation& adj,
                       const Network& net, const PollutionParams& params, const TriMesh& mesh,
                       const Discretization& disc);

/// Direct mean concentration (1/(T|Omega|)) just-solved-field quadrature:
/// lumped nodal weights in space, trapezoid in time. Verification twin of
/// eval_JP_adjoint.
double eval_JP_direct(const ScalarFieldSeries& phi, const TriMesh& mesh);

}  // namespace tsg
