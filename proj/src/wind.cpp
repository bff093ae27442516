#include "tsg/wind.hpp"

#include <algorithm>
#include <cmath>

namespace tsg {

WindField WindField::uniform_constant(double vx, double vy) {
  WindField w;
  w.times_ = {0.0};
  w.values_ = {{vx, vy}};
  return w;
}

WindField WindField::uniform_series(const std::vector<std::array<double, 3>>& samples) {
  if (samples.empty()) fail(ErrorKind::config, "wind series needs at least one sample");
  WindField w;
  for (const auto& s : samples) {
    if (!w.times_.empty() && !(s[0] > w.times_.back()))
      fail(ErrorKind::config, "wind sample times must be strictly increasing");
    w.times_.push_back(s[0]);
    w.values_.push_back({s[1], s[2]});
  }
  return w;
}

WindField WindField::nodal_series(std::vector<double> times,
                                  std::vector<std::vector<double>> values) {
  if (times.empty() || times.size() != values.size())
    fail(ErrorKind::config, "nodal wind needs matching, nonempty samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      fail(ErrorKind::config, "wind sample times must be strictly increasing");
  WindField w;
  w.times_ = std::move(times);
  w.values_ = std::move(values);
  w.nodal_ = true;
  return w;
}

void WindField::eval(const TriMesh& mesh, double t, std::vector<double>& vx,
                     std::vector<double>& vy) const {
  const std::size_t nv = mesh.vertices.size();
  vx.assign(nv, 0.0);
  vy.assign(nv, 0.0);
  if (times_.empty()) return;

  std::size_t lo = 0, hi = 0;
  double w1 = 0.0;
  if (times_.size() == 1 || t <= times_.front()) {
    lo = hi = 0;
  } else if (t >= times_.back()) {
    lo = hi = times_.size() - 1;
  } else {
    hi = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) -
                                  times_.begin());
    lo = hi - 1;
    w1 = (t - times_[lo]) / (times_[hi] - times_[lo]);
  }

  auto sample = [&](std::size_t k, std::size_t node, double& x, double& y) {
    if (nodal_) {
      x = values_[k][2 * node];
      y = values_[k][2 * node + 1];
    } else {
      x = values_[k][0];
      y = values_[k][1];
    }
  };
  for (std::size_t v = 0; v < nv; ++v) {
    double x0, y0, x1, y1;
    sample(lo, v, x0, y0);
    sample(hi, v, x1, y1);
    vx[v] = (1.0 - w1) * x0 + w1 * x1;
    vy[v] = (1.0 - w1) * y0 + w1 * y1;
  }
}

bool WindField::is_zero() const {
  for (const auto& v : values_)
    for (double x : v)
      if (x != 0.0) return false;
  return true;
}

WindField WindField::reversed(double horizon) const {
  WindField w = *this;
  if (times_.size() > 1) {
    w.times_.clear();
    w.values_.clear();
    for (std::size_t k = times_.size(); k-- > 0;) {
      w.times_.push_back(horizon - times_[k]);
      w.values_.push_back(values_[k]);
    }
  }
  for (auto& v : w.values_)
    for (double& x : v) x = -x;
  return w;
}

std::uint64_t WindField::hash() const {
  std::uint64_t h = fnv1a(times_, 0xcbf29ce484222325ull);
  for (const auto& v : values_) h = fnv1a(v, h);
  return fnv1a(nodal_ ? "nodal" : "uniform", h);
}

}  // namespace tsg
