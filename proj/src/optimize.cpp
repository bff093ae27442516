#include "tsg/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace tsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitized(double v) { return std::isfinite(v) ? v : kInf; }

/// Index-ordered parallel map: out[i] = f(i). Deterministic for any thread
/// count because results land by index.
void parallel_for_index(int n, int threads,
                        const std::function<void(int)>& body) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void GAConfig::check() const {
  if (population_size < 2) fail(ErrorKind::config, "GA: population_size must be >= 2");
  if (elite_count < 0 || elite_count >= population_size)
    fail(ErrorKind::config, "GA: elite_count must lie in [0, population_size)");
  if (crossover_fraction < 0.0 || crossover_fraction > 1.0)
    fail(ErrorKind::config, "GA: crossover_fraction must lie in [0, 1]");
  if (!(tol > 0.0)) fail(ErrorKind::config, "GA: tol must be positive");
  if (stall_generations < 1) fail(ErrorKind::config, "GA: stall_generations must be >= 1");
  if (max_generations < 1) fail(ErrorKind::config, "GA: max_generations must be >= 1");
}

void LocalSearchConfig::check() const {
  if (!(fd_step > 0.0) || fd_step > 1e-2)
    fail(ErrorKind::config, "local search: fd_step must lie in (0, 1e-2]");
  if (!(kkt_tol > 0.0)) fail(ErrorKind::config, "local search: kkt_tol must be positive");
  if (!(barrier_init > 0.0) || !(barrier_shrink > 0.0) || barrier_shrink >= 1.0)
    fail(ErrorKind::config, "local search: barrier parameters out of range");
  if (max_iters < 1) fail(ErrorKind::config, "local search: max_iters must be >= 1");
}

GAResult ga_minimize(const std::function<double(const std::vector<double>&)>& objective, int dim,
                     double lo, double hi, const GAConfig& cfg) {
  cfg.check();
  if (dim < 0) fail(ErrorKind::config, "GA: negative dimension");
  Rng rng(Rng::mix(cfg.rng_seed, 0x6741a5u));
  const int pop_n = cfg.population_size;

  GAResult res;
  if (dim == 0) {
    // Nothing to search; a single evaluation fixes the value.
    res.best = {};
    res.best_value = sanitized(objective({}));
    res.history = {res.best_value};
    res.final_population = {{}};
    res.final_fitness = {res.best_value};
    res.evaluations = 1;
    res.stalled = true;
    return res;
  }

  std::vector<std::vector<double>> pop(static_cast<std::size_t>(pop_n));
  for (auto& genome : pop) {
    genome.resize(static_cast<std::size_t>(dim));
    for (double& g : genome) g = rng.uniform(lo, hi);
  }

  std::vector<double> best_ever;
  double best_ever_value = kInf;
  std::vector<double> fitness(static_cast<std::size_t>(pop_n), kInf);
  auto evaluate = [&](const std::vector<std::vector<double>>& group,
                      std::vector<double>& out) {
    parallel_for_index(static_cast<int>(group.size()), cfg.threads, [&](int i) {
      out[static_cast<std::size_t>(i)] = sanitized(objective(group[static_cast<std::size_t>(i)]));
    });
    res.evaluations += static_cast<long>(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (out[i] < best_ever_value) {
        best_ever_value = out[i];
        best_ever = group[i];
      }
    }
  };
  evaluate(pop, fitness);

  auto order_of = [&](const std::vector<double>& fit) {
    std::vector<int> order(fit.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&fit](int a, int b) { return fit[static_cast<std::size_t>(a)] < fit[static_cast<std::size_t>(b)]; });
    return order;
  };

  auto tournament = [&]() {
    int a = rng.uniform_int(0, pop_n - 1);
    int b = rng.uniform_int(0, pop_n - 1);
    return fitness[static_cast<std::size_t>(a)] <= fitness[static_cast<std::size_t>(b)] ? a : b;
  };

  const double sigma = cfg.mutation_scale * (hi - lo);
  for (int gen = 0; gen < cfg.max_generations; ++gen) {
    std::vector<int> order = order_of(fitness);
    res.history.push_back(fitness[static_cast<std::size_t>(order[0])]);
    if (cfg.on_generation) {
      double mean = 0.0;
      int finite = 0;
      for (double f : fitness)
        if (std::isfinite(f)) {
          mean += f;
          ++finite;
        }
      mean = finite > 0 ? mean / finite : kInf;
      cfg.on_generation(gen, res.history.back(), mean, res.evaluations);
    }

    // Stall: relative best-fitness change over the window below tol.
    if (static_cast<int>(res.history.size()) > cfg.stall_generations) {
      double prev = res.history[res.history.size() - 1 - cfg.stall_generations];
      double cur = res.history.back();
      if (std::isfinite(prev) && prev - cur <= cfg.tol * std::max(1.0, std::abs(prev))) {
        res.stalled = true;
        break;
      }
    }
    if (gen == cfg.max_generations - 1) break;

    std::vector<std::vector<double>> next;
    next.reserve(static_cast<std::size_t>(pop_n));
    for (int e = 0; e < cfg.elite_count; ++e)
      next.push_back(pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);

    const int remaining = pop_n - cfg.elite_count;
    const int n_cross = static_cast<int>(std::lround(cfg.crossover_fraction * remaining));
    for (int c = 0; c < remaining; ++c) {
      if (c < n_cross) {
        const auto& p1 = pop[static_cast<std::size_t>(tournament())];
        const auto& p2 = pop[static_cast<std::size_t>(tournament())];
        std::vector<double> child(static_cast<std::size_t>(dim));
        for (int g = 0; g < dim; ++g) {
          double u = rng.uniform(-0.25, 1.25);  // blend with 25% overshoot
          child[static_cast<std::size_t>(g)] =
              std::clamp(u * p1[static_cast<std::size_t>(g)] + (1.0 - u) * p2[static_cast<std::size_t>(g)], lo, hi);
        }
        next.push_back(std::move(child));
      } else {
        std::vector<double> child = pop[static_cast<std::size_t>(tournament())];
        for (double& g : child) g = std::clamp(g + sigma * rng.normal(), lo, hi);
        next.push_back(std::move(child));
      }
    }

    std::vector<double> next_fitness(static_cast<std::size_t>(pop_n), kInf);
    // Elites keep their known fitness; evaluate only the offspring.
    for (int e = 0; e < cfg.elite_count; ++e)
      next_fitness[static_cast<std::size_t>(e)] =
          fitness[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])];
    std::vector<std::vector<double>> offspring(next.begin() + cfg.elite_count, next.end());
    std::vector<double> offspring_fitness(offspring.size(), kInf);
    evaluate(offspring, offspring_fitness);
    for (std::size_t i = 0; i < offspring.size(); ++i)
      next_fitness[static_cast<std::size_t>(cfg.elite_count) + i] = offspring_fitness[i];

    pop = std::move(next);
    fitness = std::move(next_fitness);
  }

  res.best = best_ever;
  res.best_value = best_ever_value;
  res.final_population = std::move(pop);
  res.final_fitness = std::move(fitness);
  return res;
}

std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     const std::vector<double>& x, double h) {
  std::vector<double> grad(x.size());
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double hi_step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + hi_step;
    double fp = f(probe);
    probe[i] = x[i] - hi_step;
    double fm = f(probe);
    probe[i] = x[i];
    grad[i] = (fp - fm) / (2.0 * hi_step);
  }
  return grad;
}

std::vector<double> interior_point(const std::vector<double>& x, const GroupSpec& groups,
                                   double lo, double hi, double blend) {
  std::vector<double> out = x;
  for (auto [offset, size] : groups) {
    const double uniform = 1.0 / size;
    for (int k = 0; k < size; ++k) {
      auto idx = static_cast<std::size_t>(offset + k);
      out[idx] = (1.0 - blend) * out[idx] + blend * uniform;
    }
  }
  (void)lo;
  (void)hi;
  return out;
}

namespace {

/// Center per group: the projection onto { sum over each group = 0 }.
void project_tangent(std::vector<double>& v, const GroupSpec& groups) {
  for (auto [offset, size] : groups) {
    double mean = 0.0;
    for (int k = 0; k < size; ++k) mean += v[static_cast<std::size_t>(offset + k)];
    mean /= size;
    for (int k = 0; k < size; ++k) v[static_cast<std::size_t>(offset + k)] -= mean;
  }
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

LocalResult local_minimize(const std::function<double(const std::vector<double>&)>& objective,
                           const std::vector<double>& x0, const GroupSpec& groups, double lo,
                           double hi, const LocalSearchConfig& cfg) {
  cfg.check();
  const std::size_t dim = x0.size();

  for (auto [offset, size] : groups) {
    double sum = 0.0;
    for (int k = 0; k < size; ++k) {
      double v = x0[static_cast<std::size_t>(offset + k)];
      sum += v;
      if (!(v > lo) || !(v < hi))
        fail(ErrorKind::config, "local search: start violates strict bounds at coordinate " +
                                    std::to_string(offset + k));
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(ErrorKind::config, "local search: start group at offset " + std::to_string(offset) +
                                  " does not sum to one");
  }

  LocalResult res;
  res.x = x0;
  res.value = sanitized(objective(x0));
  std::vector<double> x = x0;
  double fx = res.value;

  auto barrier_value = [&](const std::vector<double>& p, double mu_b) {
    double b = 0.0;
    for (double v : p) {
      if (!(v > lo) || !(v < hi)) return kInf;
      b -= std::log(v - lo) + std::log(hi - v);
    }
    return mu_b * b;
  };

  // Projected finite-difference gradient of the objective: derivative along
  // the group-centered coordinate directions reconstructs P grad f.
  auto projected_fd_grad = [&](const std::vector<double>& p) {
    std::vector<double> grad(dim, 0.0);
    for (auto [offset, size] : groups) {
      if (size < 2) continue;
      for (int k = 0; k < size; ++k) {
        const std::size_t idx = static_cast<std::size_t>(offset + k);
        // direction d = e_k - (1/size) over the group
        double h = cfg.fd_step * std::max(1.0, std::abs(p[idx]));
        // largest |component| of d is (1 - 1/size); keep p +- h d interior
        for (int m = 0; m < size; ++m) {
          const std::size_t jdx = static_cast<std::size_t>(offset + m);
          double comp = (m == k ? 1.0 : 0.0) - 1.0 / size;
          if (comp == 0.0) continue;
          double slack = std::min(p[jdx] - lo, hi - p[jdx]);
          h = std::min(h, 0.5 * slack / std::abs(comp));
        }
        if (!(h > 0.0)) continue;
        std::vector<double> plus = p, minus = p;
        for (int m = 0; m < size; ++m) {
          const std::size_t jdx = static_cast<std::size_t>(offset + m);
          double comp = (m == k ? 1.0 : 0.0) - 1.0 / size;
          plus[jdx] += h * comp;
          minus[jdx] -= h * comp;
        }
        double fp = sanitized(objective(plus));
        double fm = sanitized(objective(minus));
        grad[idx] = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * h) : 0.0;
      }
    }
    project_tangent(grad, groups);
    return grad;
  };

  double mu_b = cfg.barrier_init;
  int iters = 0;
  double kkt = kInf;
  const double mu_min = 1e-10;
  while (iters < cfg.max_iters) {
    std::vector<double> grad = projected_fd_grad(x);
    std::vector<double> bar_grad(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      bar_grad[i] = mu_b * (-1.0 / (x[i] - lo) + 1.0 / (hi - x[i]));
    project_tangent(bar_grad, groups);

    std::vector<double> dir(dim);
    for (std::size_t i = 0; i < dim; ++i) dir[i] = -(grad[i] + bar_grad[i]);
    kkt = norm2(dir);

    if (kkt <= std::max(cfg.kkt_tol, mu_b)) {
      if (mu_b <= mu_min) {
        res.converged = true;
        break;
      }
      mu_b = std::max(mu_min, mu_b * cfg.barrier_shrink);
      continue;
    }

    // Backtracking line search on f + barrier with an Armijo condition.
    double base = fx + barrier_value(x, mu_b);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      std::vector<double> cand(dim);
      for (std::size_t i = 0; i < dim; ++i) cand[i] = x[i] + t * dir[i];
      double bar = barrier_value(cand, mu_b);
      if (std::isfinite(bar)) {
        double fc = sanitized(objective(cand));
        if (std::isfinite(fc) && fc + bar <= base - 1e-4 * t * kkt * kkt) {
          x = std::move(cand);
          fx = fc;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    ++iters;
    if (!accepted) {
      // No progress along the projected direction at this barrier level.
      if (mu_b <= mu_min) break;
      mu_b = std::max(mu_min, mu_b * cfg.barrier_shrink);
    }
    if (fx < res.value) {
      res.value = fx;
      res.x = x;
    }
  }

  res.iterations = iters;
  res.kkt_measure = kkt;
  if (fx < res.value) {
    res.value = fx;
    res.x = x;
  }
  return res;
}

}  // namespace tsg
