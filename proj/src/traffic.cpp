#include "tsg/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsg {

double godunov_flux(const FundamentalDiagram& fd, double rho_left, double rho_right) {
  return std::min(fd.demand(rho_left), fd.supply(rho_right));
}

JunctionFluxes junction_fluxes(const Network& net, const Junction& jc,
                               const std::vector<double>& rho_end_incoming,
                               const std::vector<double>& rho_start_outgoing, const Mat& alpha,
                               const Mat& beta) {
  const int n_in = static_cast<int>(jc.incoming.size());
  const int n_out = static_cast<int>(jc.outgoing.size());
  if (static_cast<int>(rho_end_incoming.size()) != n_in ||
      static_cast<int>(rho_start_outgoing.size()) != n_out)
    fail(ErrorKind::config, "junction " + std::to_string(jc.id) + ": density vectors mismatch arity");
  if (alpha.rows != n_out || alpha.cols != n_in || beta.rows != n_in || beta.cols != n_out)
    fail(ErrorKind::config,
         "junction " + std::to_string(jc.id) + ": control matrix shape mismatches arity");

  std::vector<double> demand(static_cast<std::size_t>(n_in));
  std::vector<double> supply(static_cast<std::size_t>(n_out));
  for (int k = 0; k < n_in; ++k)
    demand[k] = net.road_by_id(jc.incoming[k]).fd.demand(rho_end_incoming[k]);
  for (int l = 0; l < n_out; ++l)
    supply[l] = net.road_by_id(jc.outgoing[l]).fd.supply(rho_start_outgoing[l]);

  JunctionFluxes out;
  out.incoming_exit.assign(static_cast<std::size_t>(n_in), 0.0);
  out.outgoing_entry.assign(static_cast<std::size_t>(n_out), 0.0);
  for (int k = 0; k < n_in; ++k) {
    for (int l = 0; l < n_out; ++l) {
      double pair_flux = std::min(alpha.at(l, k) * demand[k], beta.at(k, l) * supply[l]);
      out.incoming_exit[k] += pair_flux;
      out.outgoing_entry[l] += pair_flux;
    }
  }
  return out;
}

InflowFlux inflow_flux(double q, double f_in_now, double cap_in, const FundamentalDiagram& fd,
                       double rho_start, double dt) {
  if (!(q >= 0.0)) fail(ErrorKind::config, "inflow: queue must be nonnegative");
  if (!(dt > 0.0)) fail(ErrorKind::config, "inflow: dt must be positive");
  InflowFlux f;
  f.queue_demand = std::min(f_in_now + q / dt, cap_in);
  f.flow = std::min(f.queue_demand, fd.supply(rho_start));
  return f;
}

double outflow_flux(double rho_end, double f_out_now, const FundamentalDiagram& fd) {
  return std::min(f_out_now, fd.demand(rho_end));
}

TrafficSimulator::TrafficSimulator(const Network& net, const ControlSet& controls,
                                   const Discretization& disc)
    : net_(net), controls_(controls), disc_(disc) {
  for (std::size_t i = 0; i < net.roads.size(); ++i) {
    Attachment a = net.start_attachment(static_cast<int>(i));
    Attachment b = net.end_attachment(static_cast<int>(i));
    if (a.index < 0 || b.index < 0)
      fail(ErrorKind::validation,
           "road " + std::to_string(net.roads[i].id) + " has an unattached endpoint");
    start_.push_back(a);
    end_.push_back(b);
  }
  disc.check_cfl(net);
}

TrafficState TrafficSimulator::initial_state() const {
  TrafficState s;
  s.t = 0.0;
  s.rho.resize(net_.roads.size());
  for (std::size_t i = 0; i < net_.roads.size(); ++i) {
    const Road& r = net_.roads[i];
    int m = disc_.cells[i];
    s.rho[i].resize(static_cast<std::size_t>(m));
    for (int h = 0; h < m; ++h) {
      double mid = (h + 0.5) * disc_.ds[i];
      s.rho[i][static_cast<std::size_t>(h)] = std::clamp(r.rho0.eval(mid), 0.0, r.fd.rho_max);
    }
  }
  for (const BoundaryInflow& b : net_.inflows) s.q.push_back(b.q0);
  return s;
}

TrafficSimulator::StepFluxes TrafficSimulator::compute_fluxes(const TrafficState& state) const {
  StepFluxes fx;
  fx.interface.resize(net_.roads.size());
  for (std::size_t i = 0; i < net_.roads.size(); ++i)
    fx.interface[i].assign(state.rho[i].size() + 1, 0.0);
  fx.inflow.assign(net_.inflows.size(), 0.0);
  fx.outflow.assign(net_.outflows.size(), 0.0);

  // Interior interfaces.
  for (std::size_t i = 0; i < net_.roads.size(); ++i) {
    const FundamentalDiagram& fd = net_.roads[i].fd;
    const auto& rho = state.rho[i];
    for (std::size_t h = 1; h < rho.size(); ++h)
      fx.interface[i][h] = godunov_flux(fd, rho[h - 1], rho[h]);
  }

  // Junction coupling; the terminal cell averages act as traces.
  for (std::size_t j = 0; j < net_.junctions.size(); ++j) {
    const Junction& jc = net_.junctions[j];
    std::vector<double> rho_end, rho_start;
    for (int id : jc.incoming) {
      int i = net_.road_index(id);
      rho_end.push_back(state.rho[static_cast<std::size_t>(i)].back());
    }
    for (int id : jc.outgoing) {
      int i = net_.road_index(id);
      rho_start.push_back(state.rho[static_cast<std::size_t>(i)].front());
    }
    JunctionFluxes jf = junction_fluxes(net_, jc, rho_end, rho_start, controls_.alpha[j],
                                        controls_.beta[j]);
    for (std::size_t k = 0; k < jc.incoming.size(); ++k) {
      int i = net_.road_index(jc.incoming[k]);
      fx.interface[static_cast<std::size_t>(i)].back() = jf.incoming_exit[k];
    }
    for (std::size_t l = 0; l < jc.outgoing.size(); ++l) {
      int i = net_.road_index(jc.outgoing[l]);
      fx.interface[static_cast<std::size_t>(i)].front() = jf.outgoing_entry[l];
    }
  }

  // Boundary endpoints.
  for (std::size_t y = 0; y < net_.inflows.size(); ++y) {
    const BoundaryInflow& b = net_.inflows[y];
    int i = net_.road_index(b.road);
    const Road& r = net_.roads[static_cast<std::size_t>(i)];
    InflowFlux f = inflow_flux(state.q[y], b.f_in.eval(state.t), b.cap_in, r.fd,
                               state.rho[static_cast<std::size_t>(i)].front(), disc_.dt);
    fx.interface[static_cast<std::size_t>(i)].front() = f.flow;
    fx.inflow[y] = f.flow;
  }
  for (std::size_t z = 0; z < net_.outflows.size(); ++z) {
    const BoundaryOutflow& b = net_.outflows[z];
    int i = net_.road_index(b.road);
    const Road& r = net_.roads[static_cast<std::size_t>(i)];
    double f = outflow_flux(state.rho[static_cast<std::size_t>(i)].back(), b.f_out.eval(state.t),
                            r.fd);
    fx.interface[static_cast<std::size_t>(i)].back() = f;
    fx.outflow[z] = f;
  }
  return fx;
}

TrafficState TrafficSimulator::step(const TrafficState& state) const {
  StepFluxes fx = compute_fluxes(state);
  TrafficState next = state;
  next.t = state.t + disc_.dt;
  for (std::size_t i = 0; i < net_.roads.size(); ++i) {
    const double r = disc_.dt / disc_.ds[i];
    const double rho_max = net_.roads[i].fd.rho_max;
    auto& rho = next.rho[i];
    for (std::size_t h = 0; h < rho.size(); ++h) {
      double updated = state.rho[i][h] - r * (fx.interface[i][h + 1] - fx.interface[i][h]);
      rho[h] = std::clamp(updated, 0.0, rho_max);
    }
  }
  for (std::size_t y = 0; y < net_.inflows.size(); ++y) {
    double desired = net_.inflows[y].f_in.eval(state.t);
    next.q[y] = std::max(0.0, state.q[y] + disc_.dt * (desired - fx.inflow[y]));
  }
  return next;
}

TrafficTrajectory TrafficSimulator::run() const {
  TrafficTrajectory traj;
  traj.states.reserve(static_cast<std::size_t>(disc_.steps) + 1);
  traj.states.push_back(initial_state());
  traj.inflow_flux.reserve(static_cast<std::size_t>(disc_.steps));
  traj.outflow_flux.reserve(static_cast<std::size_t>(disc_.steps));
  for (int n = 0; n < disc_.steps; ++n) {
    const TrafficState& cur = traj.states.back();
    StepFluxes fx = compute_fluxes(cur);
    TrafficState next = cur;
    next.t = cur.t + disc_.dt;
    for (std::size_t i = 0; i < net_.roads.size(); ++i) {
      const double r = disc_.dt / disc_.ds[i];
      const double rho_max = net_.roads[i].fd.rho_max;
      for (std::size_t h = 0; h < next.rho[i].size(); ++h) {
        double updated = cur.rho[i][h] - r * (fx.interface[i][h + 1] - fx.interface[i][h]);
        next.rho[i][h] = std::clamp(updated, 0.0, rho_max);
      }
    }
    for (std::size_t y = 0; y < net_.inflows.size(); ++y) {
      double desired = net_.inflows[y].f_in.eval(cur.t);
      next.q[y] = std::max(0.0, cur.q[y] + disc_.dt * (desired - fx.inflow[y]));
    }
    traj.inflow_flux.push_back(std::move(fx.inflow));
    traj.outflow_flux.push_back(std::move(fx.outflow));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

double TrafficTrajectory::total_vehicles(const Discretization& disc, int n) const {
  const TrafficState& s = states[static_cast<std::size_t>(n)];
  double total = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    double cars = 0.0;
    for (double rho : s.rho[i]) cars += rho;
    total += disc.ds[i] * cars;
  }
  return total;
}

double TrafficTrajectory::total_queued(int n) const {
  const TrafficState& s = states[static_cast<std::size_t>(n)];
  double total = 0.0;
  for (double q : s.q) total += q;
  return total;
}

TrafficState step(const TrafficState& state, const Network& net, const ControlSet& controls,
                  const Discretization& disc) {
  return TrafficSimulator(net, controls, disc).step(state);
}

TrafficTrajectory simulate(const Network& net, const ControlSet& controls,
                           const Discretization& disc) {
  return TrafficSimulator(net, controls, disc).run();
}

}  // namespace tsg
