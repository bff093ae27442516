#pragma once

#include <vector>

#include "tsg/controls.hpp"
#include "tsg/discretization.hpp"
#include "tsg/network.hpp"

namespace tsg {

/// Cell-averaged densities plus entry queues at one instant.
struct TrafficState {
  std::vector<std::vector<double>> rho;  // [road][cell], vehicles/km
  std::vector<double> q;                 // [inflow], vehicles
  double t = 0.0;                        // h
};

/// Full record of one simulation: states at every t^n plus the realized
/// boundary fluxes of each step (what actually entered/left the roads).
struct TrafficTrajectory {
  std::vector<TrafficState> states;                 // N+1 entries
  std::vector<std::vector<double>> inflow_flux;     // [step][inflow], vehicles/h
  std::vector<std::vector<double>> outflow_flux;    // [step][outflow], vehicles/h

  int steps() const { return static_cast<int>(inflow_flux.size()); }
  /// Vehicles on roads (sum ds * rho); excludes queues.
  double total_vehicles(const Discretization& disc, int n) const;
  double total_queued(int n) const;
};

/// Godunov numerical flux min{D(left), S(right)} across a cell interface.
double godunov_flux(const FundamentalDiagram& fd, double rho_left, double rho_right);

/// Per-road flux exchange at a junction under controls (alpha, beta):
/// each (incoming k, outgoing l) pair carries
/// min{alpha_lk * D_k(rho_k_end), beta_kl * S_l(rho_l_start)}.
struct JunctionFluxes {
  std::vector<double> incoming_exit;   // per incoming road, vehicles/h
  std::vector<double> outgoing_entry;  // per outgoing road, vehicles/h
};

JunctionFluxes junction_fluxes(const Network& net, const Junction& jc,
                               const std::vector<double>& rho_end_incoming,
                               const std::vector<double>& rho_start_outgoing, const Mat& alpha,
                               const Mat& beta);

/// Queue discharge at a network entry. queue_demand is the point-queue
/// demand min{f_in + q/dt, cap_in}; flow is its supply-limited value.
struct InflowFlux {
  double flow = 0.0;
  double queue_demand = 0.0;
};

InflowFlux inflow_flux(double q, double f_in_now, double cap_in, const FundamentalDiagram& fd,
                       double rho_start, double dt);

double outflow_flux(double rho_end, double f_out_now, const FundamentalDiagram& fd);

/// Driver for the explicit conservative scheme. Builds the endpoint
/// attachment tables once and then advances states.
class TrafficSimulator {
public:
  TrafficSimulator(const Network& net, const ControlSet& controls, const Discretization& disc);

  TrafficState initial_state() const;
  /// One conservative update: interior Godunov fluxes, junction coupling at
  /// internal endpoints, queue/outflow laws at boundary endpoints, then a
  /// clamped forward-Euler queue update.
  TrafficState step(const TrafficState& state) const;
  TrafficTrajectory run() const;

private:
  struct StepFluxes {
    std::vector<std::vector<double>> interface;  // [road][cell+1]
    std::vector<double> inflow;                  // per inflow
    std::vector<double> outflow;                 // per outflow
  };
  StepFluxes compute_fluxes(const TrafficState& state) const;

  const Network& net_;
  const ControlSet& controls_;
  const Discretization& disc_;
  std::vector<Attachment> start_;  // per road
  std::vector<Attachment> end_;
};

/// One-shot convenience wrappers around TrafficSimulator.
TrafficState step(const TrafficState& state, const Network& net, const ControlSet& controls,
                  const Discretization& disc);
TrafficTrajectory simulate(const Network& net, const ControlSet& controls,
                           const Discretization& disc);

}  // namespace tsg
