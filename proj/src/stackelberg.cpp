#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "tsg/optimize.hpp"

namespace tsg {

namespace {

void bump(std::atomic<long>* c) {
  if (c) c->fetch_add(1);
}

GroupSpec groups_of(const ControlLayout& layout) {
  GroupSpec groups;
  int offset = 0;
  for (const ControlGroup& g : layout.groups) {
    groups.emplace_back(offset, g.size);
    offset += g.size;
  }
  return groups;
}

/// Quantized key (1e-6) over every entry of a control half; the GA revisits
/// near-identical leaders, so follower solves are memoized on this key.
std::vector<std::int64_t> quantize_mats(const std::vector<Mat>& mats) {
  std::vector<std::int64_t> key;
  for (const Mat& m : mats)
    for (double v : m.data) key.push_back(std::llround(v * 1e6));
  return key;
}

std::uint64_t hash_key(const std::vector<std::int64_t>& key) {
  return fnv1a(key.data(), key.size() * sizeof(std::int64_t));
}

/// Picks the evaluated individual whose fitness is closest to the finite
/// population mean; falls back to the best individual.
std::vector<double> pick_mean_individual(const GAResult& ga) {
  double mean = 0.0;
  int finite = 0;
  for (double f : ga.final_fitness)
    if (std::isfinite(f)) {
      mean += f;
      ++finite;
    }
  if (finite == 0) return ga.best;
  mean /= finite;
  int best_idx = -1;
  double best_gap = 0.0;
  for (std::size_t i = 0; i < ga.final_fitness.size(); ++i) {
    if (!std::isfinite(ga.final_fitness[i])) continue;
    double gap = std::abs(ga.final_fitness[i] - mean);
    if (best_idx < 0 || gap < best_gap) {
      best_idx = static_cast<int>(i);
      best_gap = gap;
    }
  }
  return best_idx >= 0 ? ga.final_population[static_cast<std::size_t>(best_idx)] : ga.best;
}

}  // namespace

FollowerSolution solve_follower(const std::vector<Mat>& beta, const Network& net,
                                const Discretization& disc, const FunctionalWeights& weights,
                                const FollowerConfig& cfg, EvalCounters* counters) {
  const ControlLayout layout = ControlLayout::for_alpha(net);
  const GroupSpec groups = groups_of(layout);

  auto evaluate = [&](const std::vector<double>& free_alpha) -> double {
    std::vector<Mat> alpha = decode_alpha(net, layout, free_alpha);
    ControlSet cs;
    cs.alpha = std::move(alpha);
    cs.beta = beta;
    auto violations = cs.check(net);
    if (!violations.empty())
      fail(ErrorKind::validation, "follower candidate infeasible: " + violations.front());
    TrafficTrajectory traj = simulate(net, cs, disc);
    bump(counters ? &counters->simulations : nullptr);
    bump(counters ? &counters->jt_evals : nullptr);
    return eval_JT(traj, weights, net, disc);
  };

  bump(counters ? &counters->follower_solves : nullptr);

  if (layout.dim == 0) {
    // No free preferences: the forced split is the only response.
    FollowerSolution sol;
    sol.alpha = decode_alpha(net, layout, {});
    sol.jt = evaluate({});
    return sol;
  }

  // Per-beta RNG: identical restrictions reproduce identical preferences.
  const std::uint64_t seed = Rng::mix(cfg.seed, hash_key(quantize_mats(beta)));
  Rng rng(seed);

  std::vector<double> best_x;
  double best_value = std::numeric_limits<double>::infinity();
  std::string last_error = "no start attempted";

  auto try_start = [&](const std::vector<double>& x0) {
    try {
      LocalResult local = local_minimize(evaluate, x0, groups, 0.0, 1.0, cfg.local);
      if (local.value < best_value) {
        best_value = local.value;
        best_x = local.x;
      }
    } catch (const Error& e) {
      last_error = e.what();
    }
  };

  if (cfg.ga_hybrid) {
    GAConfig ga_cfg = cfg.ga;
    ga_cfg.rng_seed = Rng::mix(seed, 0xa1f0u);
    ga_cfg.threads = cfg.threads;
    GAResult ga = ga_minimize([&](const std::vector<double>& raw) {
      try {
        return evaluate(encode_alpha(net, layout, decode_alpha(net, layout, raw)));
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    }, layout.dim, 0.0, 1.0, ga_cfg);
    std::vector<double> mean_raw = pick_mean_individual(ga);
    std::vector<double> x0 = encode_alpha(net, layout, decode_alpha(net, layout, mean_raw));
    try_start(interior_point(x0, groups, 0.0, 1.0));
  }

  const int starts = std::max(1, cfg.starts);
  for (int s = 0; s < starts; ++s) {
    std::vector<double> raw(static_cast<std::size_t>(layout.dim));
    for (double& v : raw) v = rng.uniform();
    std::vector<double> x0 = encode_alpha(net, layout, decode_alpha(net, layout, raw));
    try_start(interior_point(x0, groups, 0.0, 1.0));
  }

  if (best_x.empty() && !std::isfinite(best_value))
    fail(ErrorKind::numeric, "follower solve failed on every start: " + last_error);

  FollowerSolution sol;
  sol.alpha = decode_alpha(net, layout, best_x);
  sol.jt = best_value;
  return sol;
}

StackelbergResult solve_stackelberg(const Network& net, const TriMesh& mesh,
                                    const WindField& wind, const PollutionParams& params,
                                    const FunctionalWeights& weights, const Discretization& disc,
                                    const StackelbergConfig& cfg, EvalCounters* counters,
                                    const AdjointEvaluation* precomputed_adjoint) {
  const auto t0 = std::chrono::steady_clock::now();
  check_beta_bounds(net, cfg.beta_lo, cfg.beta_hi);
  weights.check(net);

  const RoadMeshMap map = build_road_mesh_map(net, mesh, disc);
  AdjointEvaluation adjoint_local;
  const AdjointEvaluation* adjoint = precomputed_adjoint;
  if (adjoint == nullptr) {
    adjoint_local = prepare_adjoint(net, mesh, wind, params, map, disc);
    bump(counters ? &counters->adjoint_solves : nullptr);
    adjoint = &adjoint_local;
  }

  const ControlLayout layout = ControlLayout::for_beta(net, cfg.beta_lo, cfg.beta_hi);
  const GroupSpec groups = groups_of(layout);

  StackelbergResult result;

  struct LeaderPoint {
    double jp = 0.0;
    double jt = 0.0;
    std::vector<Mat> alpha;
  };
  std::map<std::vector<std::int64_t>, LeaderPoint> memo;
  std::mutex memo_mutex;
  std::atomic<long> leader_evals{0};
  std::atomic<long> follower_solves{0};
  std::atomic<long> cache_hits{0};

  FollowerConfig follower_cfg = cfg.follower;
  follower_cfg.seed = cfg.seed;

  auto evaluate_beta = [&](const std::vector<Mat>& beta) -> LeaderPoint {
    leader_evals.fetch_add(1);
    bump(counters ? &counters->jp_evals : nullptr);
    const std::vector<std::int64_t> key = quantize_mats(beta);
    {
      std::lock_guard<std::mutex> lk(memo_mutex);
      auto it = memo.find(key);
      if (it != memo.end()) {
        cache_hits.fetch_add(1);
        bump(counters ? &counters->follower_cache_hits : nullptr);
        return it->second;
      }
    }
    FollowerSolution fs = solve_follower(beta, net, disc, weights, follower_cfg, counters);
    follower_solves.fetch_add(1);
    ControlSet cs;
    cs.alpha = fs.alpha;
    cs.beta = beta;
    TrafficTrajectory traj = simulate(net, cs, disc);
    bump(counters ? &counters->simulations : nullptr);
    LeaderPoint point;
    point.jp = eval_JP_adjoint(traj, *adjoint, net, params, mesh, disc);
    point.jt = fs.jt;
    point.alpha = std::move(fs.alpha);
    {
      std::lock_guard<std::mutex> lk(memo_mutex);
      memo.emplace(key, point);
    }
    return point;
  };

  auto leader_objective_raw = [&](const std::vector<double>& raw) -> double {
    try {
      return evaluate_beta(decode_beta(net, layout, raw)).jp;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const auto elapsed_s = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  std::vector<Mat> beta_star;
  bool ga_stalled = true;
  if (layout.dim == 0) {
    // Degenerate leader: every restriction is forced.
    beta_star = decode_beta(net, layout, {});
    result.history.push_back(evaluate_beta(beta_star).jp);
  } else {
    GAConfig ga_cfg = cfg.ga;
    ga_cfg.rng_seed = Rng::mix(cfg.seed, 0xbe7au);
    ga_cfg.threads = cfg.threads;
    ga_cfg.on_generation = [&](int gen, double best, double mean, long evals) {
      std::ostringstream os;
      os << "gen=" << gen << " best=" << format_double(best) << " mean=" << format_double(mean)
         << " evals=" << evals << " elapsed=" << format_double(elapsed_s()) << "s";
      result.progress.push_back(os.str());
      if (cfg.ga.on_generation) cfg.ga.on_generation(gen, best, mean, evals);
    };
    GAResult ga = ga_minimize(leader_objective_raw, layout.dim, cfg.beta_lo, cfg.beta_hi, ga_cfg);
    result.history = ga.history;
    ga_stalled = ga.stalled;

    auto leader_objective_feasible = [&](const std::vector<double>& x) -> double {
      try {
        return evaluate_beta(decode_beta(net, layout, x)).jp;
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    auto polish_from = [&](const std::vector<double>& raw) {
      std::vector<double> x0 = encode_beta(net, layout, decode_beta(net, layout, raw));
      x0 = interior_point(x0, groups, cfg.beta_lo, cfg.beta_hi);
      return local_minimize(leader_objective_feasible, x0, groups, cfg.beta_lo, cfg.beta_hi,
                            cfg.local);
    };

    std::vector<double> start_raw =
        cfg.start_from_population_best ? ga.best : pick_mean_individual(ga);
    LocalResult polish = polish_from(start_raw);
    // The mean-fitness start can polish into a worse basin than the GA best;
    // fall back to polishing the best individual so the returned point is
    // both a local-search output and no worse than the GA stage.
    if (!cfg.start_from_population_best && polish.value > ga.best_value) {
      LocalResult alt = polish_from(ga.best);
      if (alt.value < polish.value) polish = alt;
    }
    beta_star = decode_beta(net, layout, polish.x);
  }

  // alpha* comes from the follower response at beta*; the memoized entry is
  // exactly the last evaluation at that key.
  LeaderPoint final_point = evaluate_beta(beta_star);
  result.alpha_star = final_point.alpha;
  result.beta_star = beta_star;
  result.jp = final_point.jp;
  result.jt = final_point.jt;
  result.evaluations = leader_evals.load();
  result.follower_solves = follower_solves.load();
  result.follower_cache_hits = cache_hits.load();
  result.adjoint_solves = precomputed_adjoint ? 0 : 1;
  result.simulations = counters ? counters->simulations.load() : 0;
  result.budget_exhausted = !ga_stalled;
  result.wall_time_s = elapsed_s();
  return result;
}

}  // namespace tsg
