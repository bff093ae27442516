#pragma once

#include <vector>

#include "tsg/network.hpp"

namespace tsg {

/// Dense row-major matrix, just large enough for junction control tables.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// Junction controls for the whole network.
///
/// alpha[j] has one row per outgoing road and one column per incoming road
/// of junction j (drivers' preferences); each column sums to one. beta[j] is
/// transposed: one row per incoming road, one column per outgoing road
/// (granted entry shares); each column sums to one as well. Row/column
/// order follows the junction's incoming/outgoing lists.
struct ControlSet {
  std::vector<Mat> alpha;  // [n_out x n_in] per junction
  std::vector<Mat> beta;   // [n_in x n_out] per junction
  double beta_lo = 0.0;
  double beta_hi = 1.0;

  /// Uniform feasible controls: every column is an even split.
  static ControlSet uniform(const Network& net, double beta_lo = 0.0, double beta_hi = 1.0);

  /// All feasibility violations (shape, range, column sums) at tolerance 1e-12.
  std::vector<std::string> check(const Network& net) const;
  bool feasible(const Network& net) const { return check(net).empty(); }
};

/// Projection of raw values onto { x : sum x = 1, lo <= x_i <= hi }.
/// Bisection-free water-filling on the shift parameter; raw values map to
/// clamp(raw_i - tau, lo, hi) with tau chosen so the sum is one. Groups of
/// size one are forced to exactly 1.
std::vector<double> project_simplex_box(const std::vector<double>& raw, double lo, double hi);

/// One degree-of-freedom group of a control matrix: a column of alpha
/// (size = n_out) or of beta (size = n_in). Singleton columns are forced
/// and carry no free parameters.
struct ControlGroup {
  int junction = 0;  // junction index
  int column = 0;    // incoming index (alpha) or outgoing index (beta)
  int size = 0;      // entries in the column
};

/// Free-parameter layout for one control half. `dim` counts raw genes
/// (one per entry of every non-singleton column).
struct ControlLayout {
  std::vector<ControlGroup> groups;
  int dim = 0;
  double lo = 0.0;
  double hi = 1.0;

  static ControlLayout for_alpha(const Network& net);
  static ControlLayout for_beta(const Network& net, double lo, double hi);
};

/// Raw genes -> feasible column-stochastic matrices. Output always satisfies
/// the ControlSet invariants exactly; forced singleton columns become 1.
std::vector<Mat> decode_alpha(const Network& net, const ControlLayout& layout,
                              const std::vector<double>& raw);
std::vector<Mat> decode_beta(const Network& net, const ControlLayout& layout,
                             const std::vector<double>& raw);

/// Feasible matrices -> raw genes (feasible points are fixed points of
/// decode, which makes warm starts exact).
std::vector<double> encode_alpha(const Network& net, const ControlLayout& layout,
                                 const std::vector<Mat>& alpha);
std::vector<double> encode_beta(const Network& net, const ControlLayout& layout,
                                const std::vector<Mat>& beta);

/// Rejects bound pairs that make some column infeasible: a column with
/// n >= 2 entries requires lo*n <= 1 <= hi*n. Singleton columns are exempt
/// (forced to 1 regardless of bounds).
void check_beta_bounds(const Network& net, double lo, double hi);

}  // namespace tsg
