#pragma once

// Small networks and scenarios shared by the unit and acceptance suites.

#include <vector>

#include "tsg/common.hpp"
#include "tsg/controls.hpp"
#include "tsg/discretization.hpp"
#include "tsg/dispersion.hpp"
#include "tsg/functionals.hpp"
#include "tsg/mesh.hpp"
#include "tsg/network.hpp"
#include "tsg/wind.hpp"

namespace tsg::testing {

/// Step profile with the jump at arc length x0 (linear over a 2e-9 sliver,
/// which no cell midpoint ever samples).
inline TimeSeries step_profile(double x0, double left, double right) {
  return TimeSeries({0.0, x0 - 1e-9, x0 + 1e-9}, {left, left, right});
}

/// One road between an inflow and an outflow.
struct SingleRoad {
  Network net;
  ControlSet controls;
};

inline SingleRoad make_single_road(double length, const FundamentalDiagram& fd,
                                   const TimeSeries& rho0, double f_in, double cap_in,
                                   double f_out) {
  SingleRoad toy;
  Road r = Road::from_polyline(1, {{0.0, 1.0}, {length, 1.0}}, fd);
  r.rho0 = rho0;
  r.eps_density = 1.0;
  toy.net.roads.push_back(std::move(r));
  toy.net.inflows.push_back({1, TimeSeries(f_in), cap_in, 0.0, 1.0, 0.0});
  toy.net.outflows.push_back({1, TimeSeries(f_out), 0.0});
  toy.controls = ControlSet::uniform(toy.net);
  return toy;
}

/// Closed two-road loop through two 1-in/1-out junctions; no boundaries.
inline SingleRoad make_ring(const FundamentalDiagram& fd, const TimeSeries& rho0_a,
                            const TimeSeries& rho0_b) {
  SingleRoad toy;
  Road a = Road::from_polyline(1, {{0.0, 0.0}, {3.0, 0.0}}, fd);
  a.rho0 = rho0_a;
  Road b = Road::from_polyline(2, {{3.0, 0.0}, {3.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}}, fd);
  b.rho0 = rho0_b;
  toy.net.roads.push_back(std::move(a));
  toy.net.roads.push_back(std::move(b));
  toy.net.junctions.push_back({1, {1}, {2}});
  toy.net.junctions.push_back({2, {2}, {1}});
  toy.controls = ControlSet::uniform(toy.net);
  return toy;
}

/// Diamond: inflow -> A -> J1 -> {B top, C bottom} -> J2 -> D -> outflow.
/// The follower's one degree of freedom is the split at J1; the leader's is
/// the entry share at J2.
inline Network make_diamond(double f_in_rate) {
  Network net;
  auto fd = FundamentalDiagram::greenshields(60.0, 120.0);
  auto add_road = [&net, &fd](int id, std::vector<Point> poly, double eps) {
    Road r = Road::from_polyline(id, std::move(poly), fd);
    r.eps_density = eps;
    net.roads.push_back(std::move(r));
  };
  add_road(1, {{0.0, 1.0}, {1.0, 1.0}}, 0.5);
  add_road(2, {{1.0, 1.0}, {2.0, 2.0}, {3.0, 1.0}}, 0.5);  // top
  add_road(3, {{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}}, 0.5);  // bottom
  add_road(4, {{3.0, 1.0}, {4.0, 1.0}}, 0.5);
  net.junctions.push_back({1, {1}, {2, 3}});
  net.junctions.push_back({2, {2, 3}, {4}});
  net.inflows.push_back({1, TimeSeries(f_in_rate), 1800.0, 0.0, 0.45, 0.0});
  net.outflows.push_back({4, TimeSeries(1800.0), 0.5});
  return net;
}

/// Double diamond on [0,4]x[0,3]: a short top route through the sensitive
/// (upwind) part of the domain and a longer bottom route. Four junctions,
/// one free alpha split (J1) and one free beta column (J4).
struct StackelbergToy {
  Network net;
  TriMesh mesh;
  WindField wind;
  PollutionParams params;
  FunctionalWeights weights;
  Discretization disc;
};

inline StackelbergToy make_double_diamond() {
  StackelbergToy toy;
  auto fd = FundamentalDiagram::greenshields(60.0, 120.0);
  auto add_road = [&toy, &fd](int id, std::vector<Point> poly, double gamma) {
    Road r = Road::from_polyline(id, std::move(poly), fd);
    r.eps_density = 0.5;
    r.gamma = gamma;
    r.eta = 3.16e-5;
    toy.net.roads.push_back(std::move(r));
  };
  const double gamma = 1e4;
  add_road(1, {{0.0, 1.5}, {0.7, 1.5}}, gamma);               // A: entry
  add_road(2, {{0.7, 1.5}, {1.2, 2.2}}, gamma);               // B: top, short
  add_road(3, {{1.2, 2.2}, {3.3, 1.5}}, gamma);               // D: top, short
  add_road(4, {{0.7, 1.5}, {1.3, 0.4}}, gamma);               // C: bottom, long
  add_road(5, {{1.3, 0.4}, {2.7, 0.4}, {3.3, 1.5}}, gamma);   // E: bottom, long
  add_road(6, {{3.3, 1.5}, {4.0, 1.5}}, gamma);               // F: exit
  toy.net.junctions.push_back({1, {1}, {2, 4}});
  toy.net.junctions.push_back({2, {2}, {3}});
  toy.net.junctions.push_back({3, {4}, {5}});
  toy.net.junctions.push_back({4, {3, 5}, {6}});
  toy.net.inflows.push_back({1, TimeSeries(1500.0), 1800.0, 0.0, 0.45, 0.0});
  toy.net.outflows.push_back({6, TimeSeries(1800.0), 0.5});

  toy.mesh = make_rect_mesh(0.0, 0.0, 4.0, 3.0, 10, 8);
  toy.wind = WindField::uniform_constant(0.0, -1.2);  // top of the domain is upwind
  toy.params.mu = 3.5e-8;
  toy.params.kappa = 6e-3;
  toy.params.phi0_uniform = 0.0;
  toy.weights = FunctionalWeights::from_network(toy.net);
  toy.disc = Discretization::build(toy.net, 2e-3, 0.5, 0.15);
  return toy;
}

/// The nine-junction topology skeleton used by the validation tests (road
/// ids 1..17, entries at 1, 2, 10 and exits at 13, 14, 15).
inline Network make_nine_junction_network() {
  Network net;
  auto fd = FundamentalDiagram::greenshields(45.0, 180.0);
  auto add_road = [&net, &fd](int id, std::vector<Point> poly) {
    Road r = Road::from_polyline(id, std::move(poly), fd);
    r.eps_density = 0.5;
    net.roads.push_back(std::move(r));
  };
  // junction positions
  const Point j1{2.0, 3.5}, j2{4.0, 3.5}, j3{5.5, 3.0}, j4{5.5, 5.0}, j5{6.5, 2.0};
  const Point j6{5.0, 1.0}, j7{7.0, 6.5}, j8{8.0, 3.5}, j9{9.0, 6.0};
  add_road(1, {{0.0, 3.0}, j1});
  add_road(2, {{0.0, 2.0}, j1});
  add_road(3, {j1, j2});
  add_road(4, {j2, j4});
  add_road(5, {j2, j3});
  add_road(6, {j3, j4});
  add_road(7, {j3, j5});
  add_road(8, {j6, j5});
  add_road(9, {j6, j3});
  add_road(10, {{5.0, 0.0}, j6});
  add_road(11, {j5, j8});
  add_road(12, {j4, j7});
  add_road(13, {j9, {10.5, 7.0}});
  add_road(14, {j8, {10.5, 3.5}});
  add_road(15, {j7, {8.0, 10.0}});
  add_road(16, {j8, j9});
  add_road(17, {j7, j9});
  net.junctions.push_back({1, {1, 2}, {3}});
  net.junctions.push_back({2, {3}, {4, 5}});
  net.junctions.push_back({3, {5, 9}, {6, 7}});
  net.junctions.push_back({4, {4, 6}, {12}});
  net.junctions.push_back({5, {7, 8}, {11}});
  net.junctions.push_back({6, {10}, {8, 9}});
  net.junctions.push_back({7, {12}, {15, 17}});
  net.junctions.push_back({8, {11}, {14, 16}});
  net.junctions.push_back({9, {16, 17}, {13}});
  for (int id : {1, 2, 10})
    net.inflows.push_back({id, TimeSeries(1500.0), 2013.0, 0.0, id == 10 ? 0.1 : 0.45, 0.0});
  for (int id : {13, 14, 15}) net.outflows.push_back({id, TimeSeries(2013.0), 0.5});
  return net;
}

/// Randomized two-road chain over a rectangle mesh, for the duality
/// property. All data (diagram, emissions, wind, kappa, phi0, controls) are
/// drawn from the given generator.
struct DualityScenario {
  Network net;
  ControlSet controls;
  TriMesh mesh;
  WindField wind;
  PollutionParams params;
  Discretization disc;
};

inline DualityScenario make_duality_scenario(std::uint64_t seed, bool refined = false) {
  Rng rng(seed);  // same seed => same data at both resolutions
  DualityScenario s;
  const double v_free = rng.uniform(40.0, 70.0);
  const double rho_max = rng.uniform(80.0, 160.0);
  auto fd = FundamentalDiagram::greenshields(v_free, rho_max);
  const double y1 = rng.uniform(0.8, 2.2);
  const double y2 = rng.uniform(0.8, 2.2);
  Road r1 = Road::from_polyline(1, {{0.05, y1}, {2.0, (y1 + y2) / 2}}, fd);
  Road r2 = Road::from_polyline(2, {{2.0, (y1 + y2) / 2}, {3.95, y2}}, fd);
  for (Road* r : {&r1, &r2}) {
    r->gamma = rng.uniform(1e3, 1e4);
    r->eta = rng.uniform(0.0, 1e-4);
    r->eps_density = 0.5;
    r->rho0 = TimeSeries(rng.uniform(0.0, 0.3) * rho_max);
  }
  s.net.roads.push_back(std::move(r1));
  s.net.roads.push_back(std::move(r2));
  s.net.junctions.push_back({1, {1}, {2}});
  const double cap = fd.capacity();
  s.net.inflows.push_back({1, TimeSeries(rng.uniform(0.2, 0.8) * cap), cap, 0.0, 0.45, 0.0});
  s.net.outflows.push_back({2, TimeSeries(rng.uniform(0.5, 1.0) * cap), 0.5});
  s.controls = ControlSet::uniform(s.net);

  const int base = 6;
  s.mesh = make_rect_mesh(0.0, 0.0, 4.0, 3.0, 2 * base, base + 3);
  if (refined) s.mesh = refine_uniform(s.mesh);

  if (rng.uniform() < 0.3)
    s.wind = WindField();
  else
    s.wind = WindField::uniform_constant(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));

  s.params.mu = 3.5e-8;
  s.params.kappa = rng.uniform(0.0, 0.02);
  s.params.phi0_uniform = rng.uniform(0.0, 5.0);

  const double dt = refined ? 1e-3 : 2e-3;
  const double ds = refined ? 0.1 : 0.2;
  s.disc = Discretization::build(s.net, dt, 0.5, ds);
  return s;
}

}  // namespace tsg::testing
