#pragma once

#include <vector>

#include "tsg/common.hpp"
#include "tsg/mesh.hpp"

namespace tsg {

/// Time-sampled wind velocity field, linear in time between samples and
/// clamped outside. Each sample is either uniform in space or nodal.
class WindField {
public:
  /// Zero wind.
  WindField() = default;

  static WindField uniform_constant(double vx, double vy);
  /// samples[k] = (t_k, vx_k, vy_k), strictly increasing t_k.
  static WindField uniform_series(const std::vector<std::array<double, 3>>& samples);
  /// Nodal samples: times[k] with values[k] of size 2*nv (vx0 vy0 vx1 ...).
  static WindField nodal_series(std::vector<double> times, std::vector<std::vector<double>> values);

  /// Velocity at vertex v at time t.
  void eval(const TriMesh& mesh, double t, std::vector<double>& vx,
            std::vector<double>& vy) const;

  /// True when the field does not change over time (single sample).
  bool time_constant() const { return times_.size() <= 1; }
  bool is_zero() const;

  /// Wind for the reversed-time adjoint problem: w(t) = -v(T - t).
  WindField reversed(double horizon) const;

  std::uint64_t hash() const;

private:
  // uniform mode: values_[k] = {vx, vy}; nodal mode: 2*nv entries
  std::vector<double> times_;
  std::vector<std::vector<double>> values_;
  bool nodal_ = false;
};

}  // namespace tsg
