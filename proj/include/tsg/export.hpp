#pragma once

#include <string>

#include "tsg/dispersion.hpp"
#include "tsg/traffic.hpp"

namespace tsg {

/// Density trace, columns (n, t, road, cell, rho); 17 significant digits so
/// determinism checks can compare bytes.
void write_density_csv(const TrafficTrajectory& traj, const Network& net,
                       const Discretization& disc, const std::string& path);

/// Queue trace, columns (n, t, inflow_road, q, flux); the flux column holds
/// the admitted flow of the step starting at t^n (zero on the final row).
void write_queue_csv(const TrafficTrajectory& traj, const Network& net,
                     const Discretization& disc, const std::string& path);

/// Legacy VTK unstructured-grid snapshot of a nodal field.
void write_vtk_field(const TriMesh& mesh, const std::vector<double>& nodal,
                     const std::string& field_name, const std::string& path);

/// Snapshot series (every `stride` steps) plus the time-averaged field.
void write_vtk_series(const TriMesh& mesh, const ScalarFieldSeries& series,
                      const std::string& field_name, const std::string& dir,
                      const std::string& prefix, int stride);

/// Binary adjoint cache keyed by a hash of (mesh, wind, pollution,
/// discretization); load returns false on a missing file or key mismatch.
void save_adjoint_cache(const ScalarFieldSeries& g, std::uint64_t key, const std::string& path);
bool load_adjoint_cache(ScalarFieldSeries& g, std::uint64_t key, const std::string& path);

std::uint64_t adjoint_cache_key(const TriMesh& mesh, const WindField& wind,
                                const PollutionParams& params, const Discretization& disc);

}  // namespace tsg
