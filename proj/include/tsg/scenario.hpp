#pragma once

#include <optional>
#include <string>

#include "tsg/controls.hpp"
#include "tsg/discretization.hpp"
#include "tsg/dispersion.hpp"
#include "tsg/functionals.hpp"
#include "tsg/network.hpp"
#include "tsg/optimize.hpp"
#include "tsg/wind.hpp"

namespace tsg {

/// Everything a run needs, loaded and cross-validated from one JSON file.
/// Relative paths inside the file resolve against the file's directory.
struct Scenario {
  std::string name;
  std::string path;       // scenario file
  std::string mesh_path;  // resolved
  Network network;
  TriMesh mesh;
  WindField wind;
  PollutionParams pollution;
  FunctionalWeights weights;
  Discretization disc;
  double beta_lo = 0.0;
  double beta_hi = 1.0;
  /// Fixed controls for plain simulation runs; uniform when absent.
  ControlSet fixed_controls;
  GAConfig ga;
  LocalSearchConfig local_search;
  FollowerConfig follower;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

/// Parses and validates a scenario. Collects every validation problem and
/// reports them all in a single error (field paths included) instead of
/// stopping at the first.
Scenario load_scenario(const std::string& path);

/// Round-trip support: the canonical JSON serialization of a loaded
/// scenario. save(load(s)) == load(s) field-for-field.
std::string scenario_to_json(const Scenario& s);

}  // namespace tsg
