#include "tsg/discretization.hpp"

#include <cmath>
#include <string>

namespace tsg {

Discretization Discretization::build(const Network& net, double dt, double horizon,
                                     double target_ds, double cfl_safety,
                                     const std::vector<int>& explicit_cells) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    fail(ErrorKind::config, "discretization: dt and horizon must be positive");
  Discretization d;
  d.dt = dt;
  d.horizon = horizon;
  d.cfl_safety = cfl_safety;
  double n_real = horizon / dt;
  d.steps = static_cast<int>(std::llround(n_real));
  if (d.steps < 0 || std::abs(d.steps * dt - horizon) > 1e-12 * std::max(1.0, horizon))
    fail(ErrorKind::config, "discretization: horizon must be an integer multiple of dt");
  if (!explicit_cells.empty() && explicit_cells.size() != net.roads.size())
    fail(ErrorKind::config, "discretization: explicit cell list must cover every road");
  for (std::size_t i = 0; i < net.roads.size(); ++i) {
    int m;
    if (!explicit_cells.empty()) {
      m = explicit_cells[i];
      if (m < 1) fail(ErrorKind::config, "discretization: cell count must be >= 1");
    } else {
      if (!(target_ds > 0.0)) fail(ErrorKind::config, "discretization: target_ds must be positive");
      m = std::max(1, static_cast<int>(std::floor(net.roads[i].length / target_ds)));
    }
    d.cells.push_back(m);
    d.ds.push_back(net.roads[i].length / m);
  }
  d.check_cfl(net);
  return d;
}

void Discretization::check_cfl(const Network& net) const {
  for (std::size_t i = 0; i < net.roads.size(); ++i) {
    double speed = net.roads[i].fd.max_wave_speed();
    if (dt * speed > cfl_safety * ds[i] + 1e-15)
      fail(ErrorKind::config,
           "CFL violation on road " + std::to_string(net.roads[i].id) + ": dt*max|f'| = " +
               format_double(dt * speed) + " exceeds " + format_double(cfl_safety) + "*ds = " +
               format_double(cfl_safety * ds[i]));
  }
}

}  // namespace tsg
