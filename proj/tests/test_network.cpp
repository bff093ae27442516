#include <doctest.h>

#include <cmath>

#include "support/toys.hpp"
#include "tsg/controls.hpp"
#include "tsg/network.hpp"

using namespace tsg;

TEST_CASE("greenshields flux endpoints and closed form") {
  auto fd = FundamentalDiagram::greenshields(60.0, 120.0);
  CHECK(fd.flux(0.0) == 0.0);
  CHECK(fd.flux(120.0) == 0.0);
  CHECK(fd.flux(30.0) == doctest::Approx(1350.0).epsilon(1e-14));
  CHECK(fd.rho_crit() == doctest::Approx(60.0));
  CHECK(fd.capacity() == doctest::Approx(1800.0));
  CHECK_THROWS_AS(fd.flux(-1.0), Error);
  CHECK_THROWS_AS(fd.flux(121.0), Error);
}

TEST_CASE("demand and supply envelopes") {
  auto fd = FundamentalDiagram::greenshields(60.0, 120.0);
  CHECK(fd.demand(0.0) == 0.0);
  CHECK(fd.supply(120.0) == 0.0);
  CHECK(fd.demand(30.0) == doctest::Approx(1350.0));
  CHECK(fd.supply(30.0) == doctest::Approx(1800.0));
  CHECK(fd.demand(90.0) == doctest::Approx(1800.0));
  CHECK(fd.supply(90.0) == doctest::Approx(1350.0));

  // min{D, S} recovers the flux everywhere.
  for (int k = 0; k <= 100; ++k) {
    double rho = 120.0 * k / 100.0;
    CHECK(std::min(fd.demand(rho), fd.supply(rho)) == doctest::Approx(fd.flux(rho)).epsilon(1e-13));
  }
}

TEST_CASE("triangular diagram satisfies the axioms") {
  auto fd = FundamentalDiagram::triangular(50.0, 150.0, 45.0);
  CHECK(fd.flux(0.0) == 0.0);
  CHECK(fd.flux(150.0) == doctest::Approx(0.0));
  CHECK(fd.capacity() == doctest::Approx(50.0 * 45.0));
  CHECK(fd.demand(150.0) == doctest::Approx(fd.capacity()));
  CHECK(fd.supply(0.0) == doctest::Approx(fd.capacity()));
  CHECK(fd.max_wave_speed() == doctest::Approx(50.0));  // forward speed dominates here
  CHECK_THROWS_AS(FundamentalDiagram::triangular(50.0, 150.0, 150.0), Error);
}

TEST_CASE("concavity chord probe") {
  auto gs = FundamentalDiagram::greenshields(60.0, 120.0);
  auto tri = FundamentalDiagram::triangular(50.0, 150.0, 45.0);
  Rng rng(7);
  for (const auto& fd : {gs, tri}) {
    for (int trial = 0; trial < 100; ++trial) {
      double a = rng.uniform(0.0, fd.rho_max);
      double b = rng.uniform(0.0, fd.rho_max);
      double c = rng.uniform(0.0, fd.rho_max);
      double r1 = std::min({a, b, c}), r3 = std::max({a, b, c});
      double r2 = a + b + c - r1 - r3;
      if (r3 - r1 < 1e-9) continue;
      double w = (r2 - r1) / (r3 - r1);
      double chord = (1.0 - w) * fd.flux(r1) + w * fd.flux(r3);
      CHECK(fd.flux(r2) >= chord - 1e-9 * fd.capacity());
    }
  }
}

TEST_CASE("road arc length parametrization") {
  Road r = Road::from_polyline(1, {{0.0, 0.0}, {3.0, 4.0}, {3.0, 6.0}},
                               FundamentalDiagram::greenshields(60.0, 120.0));
  CHECK(r.length == doctest::Approx(7.0).epsilon(1e-14));
  Point p = r.position(2.5);  // halfway along the first segment
  CHECK(p[0] == doctest::Approx(1.5));
  CHECK(p[1] == doctest::Approx(2.0));
  Point q = r.position(6.0);
  CHECK(q[0] == doctest::Approx(3.0));
  CHECK(q[1] == doctest::Approx(5.0));
}

TEST_CASE("nine-junction topology skeleton validates clean") {
  Network net = tsg::testing::make_nine_junction_network();
  ValidationReport rep = validate_network(net);
  INFO(rep.to_string());
  CHECK(rep.ok());
}

TEST_CASE("road attached to two junctions is reported") {
  Network net = tsg::testing::make_nine_junction_network();
  // Attach road 3 as incoming of junction 4 as well.
  net.junctions[3].incoming.push_back(3);
  ValidationReport rep = validate_network(net);
  CHECK(!rep.ok());
  bool found = false;
  for (const auto& issue : rep.issues)
    if (issue.message.find("multiply attached") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("non-stochastic preference column is reported") {
  Network net = tsg::testing::make_nine_junction_network();
  ControlSet cs = ControlSet::uniform(net);
  cs.alpha[1].at(0, 0) = 0.4;  // junction 2: column now sums to 0.9
  auto violations = cs.check(net);
  REQUIRE(!violations.empty());
  bool found = false;
  for (const auto& v : violations)
    if (v.find("not stochastic") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("cap_in above road capacity is reported") {
  Network net = tsg::testing::make_nine_junction_network();
  net.inflows[0].cap_in = net.roads[0].fd.capacity() + 1.0;
  ValidationReport rep = validate_network(net);
  CHECK(!rep.ok());
}

TEST_CASE("bounded simplex projection") {
  // plain normalization
  auto x = project_simplex_box({2.0, 2.0}, 0.0, 1.0);
  CHECK(x[0] == doctest::Approx(0.5));
  CHECK(x[1] == doctest::Approx(0.5));
  // all-zero group splits uniformly
  x = project_simplex_box({0.0, 0.0}, 0.0, 1.0);
  CHECK(x[0] == doctest::Approx(0.5));
  CHECK(x[1] == doctest::Approx(0.5));
  // clip-then-redistribute against the relaxed bounds
  x = project_simplex_box({1.0, 0.0}, 0.2, 0.8);
  CHECK(x[0] == doctest::Approx(0.8));
  CHECK(x[1] == doctest::Approx(0.2));
  // result respects the bounds even when plain rescaling would not
  x = project_simplex_box({0.8, 0.8, 0.2}, 0.2, 0.8);
  double sum = 0.0;
  for (double v : x) {
    CHECK(v >= 0.2 - 1e-12);
    CHECK(v <= 0.8 + 1e-12);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  // singleton groups are forced
  x = project_simplex_box({0.3}, 0.2, 0.8);
  CHECK(x[0] == 1.0);
  // infeasible bounds
  CHECK_THROWS_AS(project_simplex_box({0.1, 0.1, 0.1, 0.1, 0.1, 0.1}, 0.2, 0.8), Error);
}

TEST_CASE("decode produces exactly feasible controls") {
  Network net = tsg::testing::make_nine_junction_network();
  ControlLayout alpha_layout = ControlLayout::for_alpha(net);
  ControlLayout beta_layout = ControlLayout::for_beta(net, 0.2, 0.8);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> raw_a(static_cast<std::size_t>(alpha_layout.dim));
    for (double& v : raw_a) v = rng.uniform(-0.5, 1.5);
    std::vector<double> raw_b(static_cast<std::size_t>(beta_layout.dim));
    for (double& v : raw_b) v = rng.uniform(-0.5, 1.5);
    ControlSet cs;
    cs.alpha = decode_alpha(net, alpha_layout, raw_a);
    cs.beta = decode_beta(net, beta_layout, raw_b);
    cs.beta_lo = 0.2;
    cs.beta_hi = 0.8;
    auto violations = cs.check(net);
    std::string first = violations.empty() ? std::string() : violations.front();
    INFO(first);
    CHECK(violations.empty());
  }
}

TEST_CASE("feasible points are fixed points of decode") {
  Network net = tsg::testing::make_nine_junction_network();
  ControlLayout layout = ControlLayout::for_alpha(net);
  ControlSet cs = ControlSet::uniform(net);
  std::vector<double> raw = encode_alpha(net, layout, cs.alpha);
  std::vector<Mat> again = decode_alpha(net, layout, raw);
  for (std::size_t j = 0; j < cs.alpha.size(); ++j)
    for (std::size_t k = 0; k < cs.alpha[j].data.size(); ++k)
      CHECK(again[j].data[k] == doctest::Approx(cs.alpha[j].data[k]).epsilon(1e-15));
}

TEST_CASE("beta bound feasibility per junction arity") {
  Network net = tsg::testing::make_nine_junction_network();
  CHECK_NOTHROW(check_beta_bounds(net, 0.2, 0.8));  // singletons exempt
  CHECK_NOTHROW(check_beta_bounds(net, 0.0, 1.0));
  // six incoming roads cannot each carry at least 0.2
  Network wide;
  auto fd = FundamentalDiagram::greenshields(60.0, 120.0);
  for (int id = 1; id <= 7; ++id) {
    double y = static_cast<double>(id);
    wide.roads.push_back(Road::from_polyline(id, {{0.0, y}, {1.0, y}}, fd));
  }
  Junction big;
  big.id = 1;
  big.incoming = {1, 2, 3, 4, 5, 6};
  big.outgoing = {7};
  wide.junctions.push_back(big);
  CHECK_THROWS_AS(check_beta_bounds(wide, 0.2, 0.8), Error);
}
