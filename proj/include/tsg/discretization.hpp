#pragma once

#include <vector>

#include "tsg/network.hpp"

namespace tsg {

/// Shared space-time grid of the traffic scheme. Each road i is split into
/// cells[i] cells of size ds[i] = length_i / cells[i]; time runs over
/// steps uniform intervals of dt with steps * dt = horizon.
struct Discretization {
  double dt = 0.0;           // h
  double horizon = 0.0;      // h
  int steps = 0;             // N
  std::vector<int> cells;    // M_i per road
  std::vector<double> ds;    // km per road
  double cfl_safety = 0.9;
  int substeps = 1;          // dispersion refinement factor

  /// Builds the grid from a target cell size: cells_i = max(1,
  /// floor(length_i / target_ds)), so ds_i >= target_ds. Explicit per-road
  /// cell counts may be supplied instead. Throws a configuration error when
  /// the CFL condition dt * max|f'| <= cfl_safety * ds_i fails on any road.
  static Discretization build(const Network& net, double dt, double horizon, double target_ds,
                              double cfl_safety = 0.9,
                              const std::vector<int>& explicit_cells = {});

  double time_at(int n) const { return n * dt; }
  void check_cfl(const Network& net) const;
};

}  // namespace tsg
