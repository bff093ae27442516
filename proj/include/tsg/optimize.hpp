#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tsg/controls.hpp"
#include "tsg/functionals.hpp"

namespace tsg {

struct GAConfig {
  int population_size = 50;
  int elite_count = 2;
  double crossover_fraction = 0.8;
  double mutation_scale = 0.15;      // sigma = mutation_scale * (hi - lo)
  int stall_generations = 12;
  double tol = 1e-4;                 // relative best-fitness change over the stall window
  int max_generations = 200;
  std::uint64_t rng_seed = 0;
  int threads = 1;
  /// Invoked after each generation with (generation, best, mean, evaluations).
  std::function<void(int, double, double, long)> on_generation;

  void check() const;
};

struct LocalSearchConfig {
  double fd_step = 1e-5;        // relative central-difference step
  double barrier_init = 1e-2;
  double barrier_shrink = 0.1;
  int max_iters = 400;          // total inner iterations across barrier stages
  double kkt_tol = 1e-8;

  void check() const;
};

/// Result of one GA run over raw genes in [lo, hi]^dim.
struct GAResult {
  std::vector<double> best;
  double best_value = 0.0;
  std::vector<double> history;  // best fitness per generation, non-increasing
  std::vector<std::vector<double>> final_population;
  std::vector<double> final_fitness;
  long evaluations = 0;
  bool stalled = false;  // false = stopped on the generation budget
};

/// Elitist real-coded GA (tournament selection, blend crossover, Gaussian
/// mutation). Non-finite objective values are treated as +inf and rejected.
/// Candidate evaluations within a generation may run on cfg.threads
/// threads; results are reduced by index, so the outcome is independent of
/// scheduling.
GAResult ga_minimize(const std::function<double(const std::vector<double>&)>& objective, int dim,
                     double lo, double hi, const GAConfig& cfg);

/// Sum-to-one groups of a flat variable vector (offset + size each).
using GroupSpec = std::vector<std::pair<int, int>>;

struct LocalResult {
  std::vector<double> x;
  double value = 0.0;
  double kkt_measure = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected-gradient descent with a log barrier on the box bounds.
/// Variables stay exactly on the affine sum-to-one constraints (gradients
/// and steps are group-centered); the barrier keeps them strictly inside
/// the box. x0 must be strictly interior. The returned value never exceeds
/// the value at x0.
LocalResult local_minimize(const std::function<double(const std::vector<double>&)>& objective,
                           const std::vector<double>& x0, const GroupSpec& groups, double lo,
                           double hi, const LocalSearchConfig& cfg);

/// Plain central-difference gradient, second-order accurate in h.
std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     const std::vector<double>& x, double h);

/// Strictly interior feasible point: blend of x with the uniform split.
std::vector<double> interior_point(const std::vector<double>& x, const GroupSpec& groups,
                                   double lo, double hi, double blend = 1e-3);

struct FollowerConfig {
  int starts = 5;             // multi-start count
  bool ga_hybrid = false;     // run the GA stage before the local polish
  GAConfig ga;                // used in hybrid mode
  LocalSearchConfig local;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Shared run bookkeeping (thread-safe).
struct EvalCounters {
  std::atomic<long> simulations{0};
  std::atomic<long> jt_evals{0};
  std::atomic<long> jp_evals{0};
  std::atomic<long> follower_solves{0};
  std::atomic<long> follower_cache_hits{0};
  std::atomic<long> adjoint_solves{0};
};

struct FollowerSolution {
  std::vector<Mat> alpha;
  double jt = 0.0;
};

/// Best response of the drivers to a fixed restriction vector: multi-start
/// local search over the free preference entries (optionally seeded by a GA
/// stage). A start whose simulation fails is discarded; the solve only
/// fails when every start does. The follower RNG is derived from the seed
/// and the quantized beta, so identical restrictions reproduce identical
/// preferences.
FollowerSolution solve_follower(const std::vector<Mat>& beta, const Network& net,
                                const Discretization& disc, const FunctionalWeights& weights,
                                const FollowerConfig& cfg, EvalCounters* counters = nullptr);

struct StackelbergConfig {
  GAConfig ga;                  // leader GA over beta
  LocalSearchConfig local;      // leader polish
  FollowerConfig follower;
  double beta_lo = 0.0;
  double beta_hi = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Local stage start: individual with fitness closest to the population
  /// mean (the default), or the population best.
  bool start_from_population_best = false;
};

struct StackelbergResult {
  std::vector<Mat> alpha_star;
  std::vector<Mat> beta_star;
  double jt = 0.0;
  double jp = 0.0;
  std::vector<double> history;          // leader GA best fitness per generation
  std::vector<std::string> progress;    // one line per generation
  long evaluations = 0;                 // leader objective evaluations
  long follower_solves = 0;
  long follower_cache_hits = 0;
  long adjoint_solves = 0;
  long simulations = 0;
  double wall_time_s = 0.0;
  bool budget_exhausted = false;        // best-so-far returned under a spent budget
};

/// Bi-level driver: precompute the adjoint once, run the leader GA over
/// beta (each fitness solves the follower and evaluates the adjoint-form
/// J_P), then polish with the interior-point search and recover alpha* from
/// the follower at beta*. A precomputed adjoint (e.g. from a cache) may be
/// supplied; otherwise it is solved here, exactly once.
StackelbergResult solve_stackelberg(const Network& net, const TriMesh& mesh,
                                    const WindField& wind, const PollutionParams& params,
                                    const FunctionalWeights& weights, const Discretization& disc,
                                    const StackelbergConfig& cfg,
                                    EvalCounters* counters = nullptr,
                                    const AdjointEvaluation* precomputed_adjoint = nullptr);

}  // namespace tsg
