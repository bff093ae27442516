#include "tsg/controls.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsg {

namespace {

constexpr double kStochasticTol = 1e-12;

Mat uniform_column_stochastic(int rows, int cols) {
  return Mat(rows, cols, rows > 0 ? 1.0 / rows : 0.0);
}

void check_matrix(const Network& net, const Junction& jc, const Mat& m, int n_rows, int n_cols,
                  double lo, double hi, const char* name, bool rows_are_outgoing,
                  std::vector<std::string>& out) {
  (void)net;
  const std::string where = std::string(name) + " at junction " + std::to_string(jc.id);
  if (m.rows != n_rows || m.cols != n_cols) {
    out.push_back(where + ": shape " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                  ", expected " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
    return;
  }
  for (int c = 0; c < n_cols; ++c) {
    double sum = 0.0;
    for (int r = 0; r < n_rows; ++r) {
      double v = m.at(r, c);
      sum += v;
      // Forced singleton columns are exempt from the box bounds.
      if (n_rows >= 2 && (v < lo - kStochasticTol || v > hi + kStochasticTol))
        out.push_back(where + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                      ") outside [" + format_double(lo) + ", " + format_double(hi) + "]");
    }
    if (std::abs(sum - 1.0) > kStochasticTol)
      out.push_back(where + ": " + (rows_are_outgoing ? "preference" : "restriction") +
                    " column " + std::to_string(c) + " not stochastic (sums to " +
                    format_double(sum) + ")");
  }
}

}  // namespace

ControlSet ControlSet::uniform(const Network& net, double beta_lo, double beta_hi) {
  ControlSet cs;
  cs.beta_lo = beta_lo;
  cs.beta_hi = beta_hi;
  cs.alpha.reserve(net.junctions.size());
  cs.beta.reserve(net.junctions.size());
  for (const Junction& jc : net.junctions) {
    int n_in = static_cast<int>(jc.incoming.size());
    int n_out = static_cast<int>(jc.outgoing.size());
    cs.alpha.push_back(uniform_column_stochastic(n_out, n_in));
    cs.beta.push_back(uniform_column_stochastic(n_in, n_out));
  }
  return cs;
}

std::vector<std::string> ControlSet::check(const Network& net) const {
  std::vector<std::string> out;
  if (alpha.size() != net.junctions.size() || beta.size() != net.junctions.size()) {
    out.push_back("control set covers " + std::to_string(alpha.size()) + "/" +
                  std::to_string(beta.size()) + " junctions, network has " +
                  std::to_string(net.junctions.size()));
    return out;
  }
  if (!(beta_lo >= 0.0 && beta_hi <= 1.0 && beta_lo <= beta_hi))
    out.push_back("beta bounds must satisfy 0 <= lo <= hi <= 1");
  for (std::size_t j = 0; j < net.junctions.size(); ++j) {
    const Junction& jc = net.junctions[j];
    int n_in = static_cast<int>(jc.incoming.size());
    int n_out = static_cast<int>(jc.outgoing.size());
    check_matrix(net, jc, alpha[j], n_out, n_in, 0.0, 1.0, "alpha", true, out);
    check_matrix(net, jc, beta[j], n_in, n_out, beta_lo, beta_hi, "beta", false, out);
  }
  return out;
}

std::vector<double> project_simplex_box(const std::vector<double>& raw, double lo, double hi) {
  const int n = static_cast<int>(raw.size());
  if (n == 1) return {1.0};
  if (!(lo * n <= 1.0 + 1e-12 && 1.0 <= hi * n + 1e-12))
    fail(ErrorKind::config, "bounds [" + format_double(lo) + ", " + format_double(hi) +
                                "] infeasible for a group of " + std::to_string(n));
  auto sum_at = [&](double tau) {
    double s = 0.0;
    for (double v : raw) s += std::clamp(v - tau, lo, hi);
    return s;
  };
  // clamp(v - tau) is nonincreasing in tau; bracket then bisect.
  double tau_lo = *std::min_element(raw.begin(), raw.end()) - hi;   // sum = n*hi >= 1
  double tau_hi = *std::max_element(raw.begin(), raw.end()) - lo;   // sum = n*lo <= 1
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (tau_lo + tau_hi);
    if (sum_at(mid) > 1.0)
      tau_lo = mid;
    else
      tau_hi = mid;
  }
  double tau = 0.5 * (tau_lo + tau_hi);
  std::vector<double> x(raw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    x[i] = std::clamp(raw[i] - tau, lo, hi);
    sum += x[i];
  }
  // Exact column sum: shift the residual into entries with slack.
  double residual = 1.0 - sum;
  for (std::size_t i = 0; i < x.size() && std::abs(residual) > 0.0; ++i) {
    double adjusted = std::clamp(x[i] + residual, lo, hi);
    residual -= adjusted - x[i];
    x[i] = adjusted;
  }
  return x;
}

ControlLayout ControlLayout::for_alpha(const Network& net) {
  ControlLayout layout;
  layout.lo = 0.0;
  layout.hi = 1.0;
  for (std::size_t j = 0; j < net.junctions.size(); ++j) {
    int n_in = static_cast<int>(net.junctions[j].incoming.size());
    int n_out = static_cast<int>(net.junctions[j].outgoing.size());
    if (n_out < 2) continue;
    for (int k = 0; k < n_in; ++k) {
      layout.groups.push_back({static_cast<int>(j), k, n_out});
      layout.dim += n_out;
    }
  }
  return layout;
}

ControlLayout ControlLayout::for_beta(const Network& net, double lo, double hi) {
  ControlLayout layout;
  layout.lo = lo;
  layout.hi = hi;
  for (std::size_t j = 0; j < net.junctions.size(); ++j) {
    int n_in = static_cast<int>(net.junctions[j].incoming.size());
    int n_out = static_cast<int>(net.junctions[j].outgoing.size());
    if (n_in < 2) continue;
    for (int l = 0; l < n_out; ++l) {
      layout.groups.push_back({static_cast<int>(j), l, n_in});
      layout.dim += n_in;
    }
  }
  return layout;
}

namespace {

/// Shared decode path: fills each layout column by bounded-simplex
/// projection of its raw slice, leaving forced columns at 1.
std::vector<Mat> decode(const Network& net, const ControlLayout& layout,
                        const std::vector<double>& raw, bool is_alpha) {
  if (static_cast<int>(raw.size()) != layout.dim)
    fail(ErrorKind::config, "raw vector has " + std::to_string(raw.size()) + " genes, layout needs " +
                                std::to_string(layout.dim));
  std::vector<Mat> mats;
  mats.reserve(net.junctions.size());
  for (const Junction& jc : net.junctions) {
    int n_in = static_cast<int>(jc.incoming.size());
    int n_out = static_cast<int>(jc.outgoing.size());
    int rows = is_alpha ? n_out : n_in;
    int cols = is_alpha ? n_in : n_out;
    mats.push_back(rows == 1 ? Mat(rows, cols, 1.0) : Mat(rows, cols, 0.0));
  }
  std::size_t offset = 0;
  for (const ControlGroup& g : layout.groups) {
    std::vector<double> slice(raw.begin() + static_cast<long>(offset),
                              raw.begin() + static_cast<long>(offset + g.size));
    // An all-equal group (including all-zero) projects to the uniform split.
    std::vector<double> col = project_simplex_box(slice, layout.lo, layout.hi);
    Mat& m = mats[static_cast<std::size_t>(g.junction)];
    for (int r = 0; r < g.size; ++r) m.at(r, g.column) = col[static_cast<std::size_t>(r)];
    offset += static_cast<std::size_t>(g.size);
  }
  return mats;
}

std::vector<double> encode(const ControlLayout& layout, const std::vector<Mat>& mats) {
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(layout.dim));
  for (const ControlGroup& g : layout.groups) {
    const Mat& m = mats[static_cast<std::size_t>(g.junction)];
    for (int r = 0; r < g.size; ++r) raw.push_back(m.at(r, g.column));
  }
  return raw;
}

}  // namespace

std::vector<Mat> decode_alpha(const Network& net, const ControlLayout& layout,
                              const std::vector<double>& raw) {
  return decode(net, layout, raw, true);
}

std::vector<Mat> decode_beta(const Network& net, const ControlLayout& layout,
                             const std::vector<double>& raw) {
  return decode(net, layout, raw, false);
}

std::vector<double> encode_alpha(const Network& net, const ControlLayout& layout,
                                 const std::vector<Mat>& alpha) {
  (void)net;
  return encode(layout, alpha);
}

std::vector<double> encode_beta(const Network& net, const ControlLayout& layout,
                                const std::vector<Mat>& beta) {
  (void)net;
  return encode(layout, beta);
}

void check_beta_bounds(const Network& net, double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
    fail(ErrorKind::validation, "beta bounds must satisfy 0 <= lo <= hi <= 1");
  for (const Junction& jc : net.junctions) {
    int n = static_cast<int>(jc.incoming.size());
    if (n < 2) continue;  // singleton columns are forced to 1
    if (lo * n > 1.0 + 1e-12 || hi * n < 1.0 - 1e-12)
      fail(ErrorKind::validation,
           "beta bounds [" + format_double(lo) + ", " + format_double(hi) +
               "] infeasible at junction " + std::to_string(jc.id) + " with " + std::to_string(n) +
               " incoming roads");
  }
}

}  // namespace tsg
