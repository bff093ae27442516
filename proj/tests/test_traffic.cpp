#include <doctest.h>

#include <cmath>

#include "support/riemann.hpp"
#include "support/toys.hpp"
#include "tsg/traffic.hpp"

using namespace tsg;
using namespace tsg::testing;

namespace {

const FundamentalDiagram kGs = FundamentalDiagram::greenshields(60.0, 120.0);

double l1_error_vs_riemann(double rho_left, double rho_right, double target_ds, double dt,
                           double horizon) {
  const double length = 4.0;
  const double x0 = 2.0;
  SingleRoad toy = make_single_road(length, kGs, step_profile(x0, rho_left, rho_right),
                                    kGs.flux(rho_left), kGs.capacity(), kGs.flux(rho_right));
  Discretization disc = Discretization::build(toy.net, dt, horizon, target_ds);
  TrafficTrajectory traj = simulate(toy.net, toy.controls, disc);
  const auto& rho = traj.states.back().rho[0];
  double err = 0.0;
  for (std::size_t h = 0; h < rho.size(); ++h) {
    double mid = (static_cast<double>(h) + 0.5) * disc.ds[0];
    err += disc.ds[0] * std::abs(rho[h] - riemann_exact(kGs, rho_left, rho_right, x0, mid, horizon));
  }
  return err;
}

}  // namespace

TEST_CASE("godunov flux basics") {
  CHECK(godunov_flux(kGs, 0.0, 50.0) == 0.0);
  CHECK(godunov_flux(kGs, 30.0, 120.0) == 0.0);
  CHECK(godunov_flux(kGs, 30.0, 90.0) == doctest::Approx(1350.0));
  CHECK(godunov_flux(kGs, 30.0, 30.0) == doctest::Approx(kGs.flux(30.0)));
  // monotone: nondecreasing in the left state, nonincreasing in the right
  for (int k = 0; k < 20; ++k) {
    double rho = 6.0 * k;
    CHECK(godunov_flux(kGs, rho, 60.0) <= godunov_flux(kGs, std::min(120.0, rho + 6.0), 60.0) + 1e-12);
    CHECK(godunov_flux(kGs, 60.0, rho) >= godunov_flux(kGs, 60.0, std::min(120.0, rho + 6.0)) - 1e-12);
  }
}

TEST_CASE("junction flux coupling conserves cars") {
  Network net = make_nine_junction_network();
  const Junction& j3 = net.junctions[2];  // incoming {5, 9}, outgoing {6, 7}
  Mat alpha(2, 2);
  alpha.at(0, 0) = 0.40;
  alpha.at(0, 1) = 0.16;
  alpha.at(1, 0) = 0.60;
  alpha.at(1, 1) = 0.84;
  Mat beta(2, 2);
  // row k=5 blocked toward both outgoing roads
  beta.at(0, 0) = 0.0;
  beta.at(0, 1) = 0.0;
  beta.at(1, 0) = 1.0;
  beta.at(1, 1) = 1.0;
  JunctionFluxes jf = junction_fluxes(net, j3, {40.0, 50.0}, {20.0, 30.0}, alpha, beta);
  // road 5 fully blocked
  CHECK(jf.incoming_exit[0] == 0.0);
  CHECK(jf.incoming_exit[1] > 0.0);
  double in_total = jf.incoming_exit[0] + jf.incoming_exit[1];
  double out_total = jf.outgoing_entry[0] + jf.outgoing_entry[1];
  CHECK(in_total == doctest::Approx(out_total).epsilon(1e-15));
  // outgoing flows only fed by road 9
  auto d9 = net.road_by_id(9).fd.demand(50.0);
  CHECK(jf.outgoing_entry[0] ==
        doctest::Approx(std::min(alpha.at(0, 1) * d9, net.road_by_id(6).fd.supply(20.0))));
}

TEST_CASE("one-in one-out junction with unit controls") {
  SingleRoad ring = make_ring(kGs, TimeSeries(30.0), TimeSeries(30.0));
  const Junction& jc = ring.net.junctions[0];
  Mat one(1, 1, 1.0);
  JunctionFluxes jf = junction_fluxes(ring.net, jc, {30.0}, {30.0}, one, one);
  CHECK(jf.incoming_exit[0] == doctest::Approx(1350.0));
  CHECK(jf.outgoing_entry[0] == doctest::Approx(1350.0));
}

TEST_CASE("junction arity mismatch is rejected") {
  Network net = make_nine_junction_network();
  Mat wrong(1, 1, 1.0);
  CHECK_THROWS_AS(
      junction_fluxes(net, net.junctions[2], {40.0, 50.0}, {20.0, 30.0}, wrong, wrong), Error);
}

TEST_CASE("inflow flux and queue demand") {
  auto f = inflow_flux(0.0, 0.0, 2013.0, kGs, 10.0, 4e-3);
  CHECK(f.flow == 0.0);
  f = inflow_flux(0.0, 3000.0, 2013.0, kGs, 0.0, 4e-3);
  CHECK(f.queue_demand == doctest::Approx(2013.0));
  CHECK(f.flow == doctest::Approx(1800.0));
  f = inflow_flux(5.0, 1000.0, 2013.0, kGs, 120.0, 4e-3);
  CHECK(f.flow == 0.0);  // jammed road admits nothing
  CHECK_THROWS_AS(inflow_flux(-1.0, 0.0, 100.0, kGs, 0.0, 4e-3), Error);
}

TEST_CASE("outflow flux") {
  CHECK(outflow_flux(0.0, 2013.0, kGs) == 0.0);
  CHECK(outflow_flux(50.0, 0.0, kGs) == 0.0);
  CHECK(outflow_flux(90.0, 2013.0, kGs) == doctest::Approx(1800.0));
}

TEST_CASE("uniform state on a ring stays put") {
  SingleRoad ring = make_ring(kGs, TimeSeries(47.0), TimeSeries(47.0));
  Discretization disc = Discretization::build(ring.net, 1e-3, 0.1, 0.25);
  TrafficSimulator sim(ring.net, ring.controls, disc);
  TrafficState s0 = sim.initial_state();
  TrafficState s1 = sim.step(s0);
  for (std::size_t i = 0; i < s1.rho.size(); ++i)
    for (std::size_t h = 0; h < s1.rho[i].size(); ++h) CHECK(s1.rho[i][h] == s0.rho[i][h]);
}

TEST_CASE("zero network stays zero") {
  SingleRoad toy = make_single_road(2.0, kGs, TimeSeries(0.0), 0.0, 1800.0, 2013.0);
  Discretization disc = Discretization::build(toy.net, 1e-3, 0.05, 0.2);
  TrafficTrajectory traj = simulate(toy.net, toy.controls, disc);
  for (const auto& s : traj.states)
    for (double rho : s.rho[0]) CHECK(rho == 0.0);
}

TEST_CASE("stationary shock is exact") {
  // f(30) = f(90): the jump sits on a cell interface and must not move.
  SingleRoad toy = make_single_road(4.0, kGs, step_profile(2.0, 30.0, 90.0), kGs.flux(30.0),
                                    kGs.capacity(), kGs.flux(90.0));
  Discretization disc = Discretization::build(toy.net, 1e-3, 0.05, 0.2);
  TrafficTrajectory traj = simulate(toy.net, toy.controls, disc);
  const auto& rho = traj.states.back().rho[0];
  for (std::size_t h = 0; h < rho.size(); ++h) {
    double mid = (static_cast<double>(h) + 0.5) * disc.ds[0];
    CHECK(rho[h] == doctest::Approx(mid < 2.0 ? 30.0 : 90.0).epsilon(1e-13));
  }
}

TEST_CASE("riemann convergence: moving shock and rarefaction") {
  // L1 error halves (within 20%) when both ds and dt halve.
  const double horizon = 0.024;
  SUBCASE("shock") {
    double coarse = l1_error_vs_riemann(20.0, 90.0, 0.05, 7.5e-4, horizon);
    double fine = l1_error_vs_riemann(20.0, 90.0, 0.025, 3.75e-4, horizon);
    CHECK(fine > 0.0);
    double ratio = coarse / fine;
    INFO("shock ratio ", ratio);
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
  }
  SUBCASE("rarefaction") {
    double coarse = l1_error_vs_riemann(90.0, 30.0, 0.05, 7.5e-4, horizon);
    double fine = l1_error_vs_riemann(90.0, 30.0, 0.025, 3.75e-4, horizon);
    CHECK(fine > 0.0);
    double ratio = coarse / fine;
    INFO("rarefaction ratio ", ratio);
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
  }
}

TEST_CASE("closed loop conserves vehicles") {
  SingleRoad ring = make_ring(kGs, step_profile(1.5, 20.0, 80.0), TimeSeries(40.0));
  Discretization disc = Discretization::build(ring.net, 1e-3, 0.5, 0.25);
  TrafficTrajectory traj = simulate(ring.net, ring.controls, disc);
  double initial = traj.total_vehicles(disc, 0);
  for (int n = 1; n <= disc.steps; ++n)
    CHECK(std::abs(traj.total_vehicles(disc, n) - initial) <= 1e-10 * initial);
}

TEST_CASE("open network mass balance per step") {
  Network net = make_nine_junction_network();
  for (Road& r : net.roads) r.rho0 = TimeSeries(15.0);
  ControlSet cs = ControlSet::uniform(net);
  Discretization disc = Discretization::build(net, 4e-3, 0.5, 0.2);
  TrafficTrajectory traj = simulate(net, cs, disc);
  for (int n = 0; n < disc.steps; ++n) {
    double before = traj.total_vehicles(disc, n) + traj.total_queued(n);
    double after = traj.total_vehicles(disc, n + 1) + traj.total_queued(n + 1);
    double in_rate = 0.0;
    for (const auto& b : net.inflows) in_rate += b.f_in.eval(disc.time_at(n));
    double out_rate = 0.0;
    for (double f : traj.outflow_flux[static_cast<std::size_t>(n)]) out_rate += f;
    double expected = disc.dt * (in_rate - out_rate);
    CHECK(after - before == doctest::Approx(expected).epsilon(1e-8).scale(std::max(1.0, before)));
  }
}

TEST_CASE("junction balance at every step") {
  Network net = make_nine_junction_network();
  for (Road& r : net.roads) r.rho0 = TimeSeries(25.0);
  ControlSet cs = ControlSet::uniform(net);
  Discretization disc = Discretization::build(net, 4e-3, 0.1, 0.2);
  TrafficSimulator sim(net, cs, disc);
  TrafficState s = sim.initial_state();
  for (int n = 0; n < disc.steps; ++n) {
    for (std::size_t j = 0; j < net.junctions.size(); ++j) {
      const Junction& jc = net.junctions[j];
      std::vector<double> rho_end, rho_start;
      for (int id : jc.incoming) rho_end.push_back(s.rho[static_cast<std::size_t>(net.road_index(id))].back());
      for (int id : jc.outgoing) rho_start.push_back(s.rho[static_cast<std::size_t>(net.road_index(id))].front());
      JunctionFluxes jf = junction_fluxes(net, jc, rho_end, rho_start, cs.alpha[j], cs.beta[j]);
      double in_total = 0.0, out_total = 0.0;
      for (double f : jf.incoming_exit) in_total += f;
      for (double f : jf.outgoing_entry) out_total += f;
      CHECK(in_total == doctest::Approx(out_total).epsilon(1e-12));
    }
    s = sim.step(s);
  }
}

TEST_CASE("densities stay inside the invariant region") {
  Network net = make_diamond(1500.0);
  // block the top route to force congestion
  ControlSet cs = ControlSet::uniform(net);
  cs.beta[1].at(0, 0) = 0.0;
  cs.beta[1].at(1, 0) = 1.0;
  Discretization disc = Discretization::build(net, 2e-3, 0.5, 0.25);
  TrafficTrajectory traj = simulate(net, cs, disc);
  for (const auto& state : traj.states) {
    for (std::size_t i = 0; i < net.roads.size(); ++i) {
      for (double rho : state.rho[i]) {
        CHECK(rho >= 0.0);
        CHECK(rho <= net.roads[i].fd.rho_max);
      }
    }
    for (double q : state.q) CHECK(q >= 0.0);
  }
  // the blocked branch actually fills up
  double top_max = 0.0;
  for (double rho : traj.states.back().rho[1]) top_max = std::max(top_max, rho);
  CHECK(top_max > 100.0);
}

TEST_CASE("simulation is deterministic") {
  Network net = make_diamond(1200.0);
  ControlSet cs = ControlSet::uniform(net);
  Discretization disc = Discretization::build(net, 2e-3, 0.2, 0.25);
  TrafficTrajectory a = simulate(net, cs, disc);
  TrafficTrajectory b = simulate(net, cs, disc);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t n = 0; n < a.states.size(); ++n) {
    for (std::size_t i = 0; i < a.states[n].rho.size(); ++i)
      for (std::size_t h = 0; h < a.states[n].rho[i].size(); ++h)
        CHECK(a.states[n].rho[i][h] == b.states[n].rho[i][h]);
    for (std::size_t y = 0; y < a.states[n].q.size(); ++y)
      CHECK(a.states[n].q[y] == b.states[n].q[y]);
  }
}

TEST_CASE("zero-step simulation returns the initial state only") {
  SingleRoad toy = make_single_road(2.0, kGs, TimeSeries(10.0), 100.0, 1800.0, 2013.0);
  Discretization disc = Discretization::build(toy.net, 1e-3, 0.05, 0.2);
  disc.steps = 0;
  TrafficTrajectory traj = simulate(toy.net, toy.controls, disc);
  CHECK(traj.states.size() == 1);
  CHECK(traj.inflow_flux.empty());
}

TEST_CASE("CFL violation is a configuration error") {
  SingleRoad toy = make_single_road(2.0, kGs, TimeSeries(10.0), 100.0, 1800.0, 2013.0);
  CHECK_THROWS_AS(Discretization::build(toy.net, 4e-3, 0.2, 0.2), Error);
  // the paper-scale grid works at v_free = 45
  SingleRoad slower = make_single_road(
      2.05, FundamentalDiagram::greenshields(45.0, 180.0), TimeSeries(0.0), 100.0, 2013.0, 2013.0);
  Discretization disc = Discretization::build(slower.net, 4e-3, 0.2, 0.2);
  CHECK(disc.ds[0] == doctest::Approx(0.205));
}
