#include "tsg/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "tsg/export.hpp"

namespace tsg {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json control_table(const Network& net, const std::vector<Mat>& mats, bool rows_are_outgoing) {
  json out = json::array();
  for (std::size_t j = 0; j < net.junctions.size(); ++j) {
    const Junction& jc = net.junctions[j];
    json rows = json::array();
    for (int r = 0; r < mats[j].rows; ++r) {
      json row = json::array();
      for (int c = 0; c < mats[j].cols; ++c) row.push_back(mats[j].at(r, c));
      rows.push_back(row);
    }
    out.push_back({{"junction", jc.id},
                   {"incoming", jc.incoming},
                   {"outgoing", jc.outgoing},
                   {rows_are_outgoing ? "alpha" : "beta", rows}});
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << content;
}

/// Adjoint field for the scenario, via the on-disk cache when possible.
AdjointEvaluation cached_adjoint(const Scenario& s, const RoadMeshMap& map, const fs::path& out,
                                 EvalCounters& counters, bool& cache_hit) {
  const std::uint64_t key = adjoint_cache_key(s.mesh, s.wind, s.pollution, s.disc);
  const std::string cache_path = (out / "adjoint_cache.bin").string();
  ScalarFieldSeries g;
  if (load_adjoint_cache(g, key, cache_path)) {
    cache_hit = true;
    return finish_adjoint(std::move(g), s.network, s.mesh, s.wind, map, s.disc);
  }
  cache_hit = false;
  AdjointEvaluation adj =
      prepare_adjoint(s.network, s.mesh, s.wind, s.pollution, map, s.disc);
  counters.adjoint_solves.fetch_add(1);
  save_adjoint_cache(adj.g, key, cache_path);
  return adj;
}

}  // namespace

std::string RunReport::to_json() const {
  json j;
  j["command"] = command;
  j["scenario"] = scenario;
  if (jt) j["JT"] = *jt;
  if (jp) j["JP"] = *jp;
  j["wall_time_s"] = wall_time_s;
  j["counts"] = {{"simulations", simulations},
                 {"jt_evals", jt_evals},
                 {"jp_evals", jp_evals},
                 {"follower_solves", follower_solves},
                 {"follower_cache_hits", follower_cache_hits},
                 {"adjoint_solves", adjoint_solves}};
  j["adjoint_cache_hit"] = adjoint_cache_hit;
  j["budget_exhausted"] = budget_exhausted;
  j["artifacts"] = artifacts;
  return j.dump(2) + "\n";
}

RunReport run_command(const std::string& command, const Scenario& scenario,
                      const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario s = scenario;
  if (opts.seed) s.seed = *opts.seed;
  if (opts.relaxed) {
    s.beta_lo = 0.2;
    s.beta_hi = 0.8;
    check_beta_bounds(s.network, s.beta_lo, s.beta_hi);
  }
  if (opts.hybrid_follower) s.follower.ga_hybrid = true;
  s.follower.seed = s.seed;
  s.ga.rng_seed = s.seed;

  const fs::path out = opts.out_dir.empty() ? fs::path(s.out_dir) : fs::path(opts.out_dir);
  fs::create_directories(out);

  RunReport report;
  report.command = command;
  report.scenario = s.name;
  EvalCounters counters;

  const RoadMeshMap map = build_road_mesh_map(s.network, s.mesh, s.disc);

  if (command == "simulate") {
    TrafficTrajectory traj = simulate(s.network, s.fixed_controls, s.disc);
    counters.simulations.fetch_add(1);
    report.jt = eval_JT(traj, s.weights, s.network, s.disc);
    const std::string density = (out / "trajectory_density.csv").string();
    const std::string queues = (out / "trajectory_queues.csv").string();
    write_density_csv(traj, s.network, s.disc, density);
    write_queue_csv(traj, s.network, s.disc, queues);
    report.artifacts = {density, queues};
  } else if (command == "adjoint") {
    bool hit = false;
    AdjointEvaluation adj = cached_adjoint(s, map, out, counters, hit);
    report.adjoint_cache_hit = hit;
    const int stride = std::max(1, s.disc.steps / 10);
    write_vtk_series(s.mesh, adj.g, "adjoint", (out / "fields").string(), "g", stride);
    report.artifacts = {(out / "fields").string(), (out / "adjoint_cache.bin").string()};
  } else if (command == "follower") {
    FollowerConfig fcfg = s.follower;
    fcfg.threads = opts.threads;
    FollowerSolution sol =
        solve_follower(s.fixed_controls.beta, s.network, s.disc, s.weights, fcfg, &counters);
    report.jt = sol.jt;
    json table = control_table(s.network, sol.alpha, true);
    const std::string alpha_path = (out / "alpha_table.json").string();
    write_text(alpha_path, table.dump(2) + "\n");
    report.artifacts = {alpha_path};
  } else if (command == "stackelberg") {
    bool hit = false;
    AdjointEvaluation adj = cached_adjoint(s, map, out, counters, hit);
    report.adjoint_cache_hit = hit;

    StackelbergConfig cfg;
    cfg.ga = s.ga;
    cfg.local = s.local_search;
    cfg.follower = s.follower;
    cfg.beta_lo = s.beta_lo;
    cfg.beta_hi = s.beta_hi;
    cfg.seed = s.seed;
    cfg.threads = opts.threads;
    StackelbergResult res = solve_stackelberg(s.network, s.mesh, s.wind, s.pollution, s.weights,
                                              s.disc, cfg, &counters, &adj);
    report.jt = res.jt;
    report.jp = res.jp;
    report.budget_exhausted = res.budget_exhausted;

    json result;
    result["scenario"] = s.name;
    result["seed"] = s.seed;
    result["beta_bounds"] = {s.beta_lo, s.beta_hi};
    result["JT"] = res.jt;
    result["JP"] = res.jp;
    result["alpha_star"] = control_table(s.network, res.alpha_star, true);
    result["beta_star"] = control_table(s.network, res.beta_star, false);
    result["history"] = res.history;
    result["evaluations"] = res.evaluations;
    result["follower_solves"] = res.follower_solves;
    result["follower_cache_hits"] = res.follower_cache_hits;
    result["budget_exhausted"] = res.budget_exhausted;
    const std::string result_path = (out / "stackelberg_result.json").string();
    write_text(result_path, result.dump(2) + "\n");

    std::string log;
    for (const auto& line : res.progress) log += line + "\n";
    const std::string log_path = (out / "generations.log").string();
    write_text(log_path, log);
    report.artifacts = {result_path, log_path};
  } else {
    fail(ErrorKind::config, "unknown command '" + command + "'");
  }

  report.simulations = counters.simulations.load();
  report.jt_evals = counters.jt_evals.load();
  report.jp_evals = counters.jp_evals.load();
  report.follower_solves = counters.follower_solves.load();
  report.follower_cache_hits = counters.follower_cache_hits.load();
  report.adjoint_solves = counters.adjoint_solves.load();
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string report_path = (out / "report.json").string();
  write_text(report_path, report.to_json());
  report.artifacts.push_back(report_path);
  return report;
}

std::string build_comparison_table(const std::vector<std::string>& report_files) {
  struct Row {
    std::string name;
    std::optional<double> jp, jt;
  };
  std::vector<Row> rows;
  for (const auto& file : report_files) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::io, "cannot open report " + file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::validation, "report " + file + ": " + e.what());
    }
    Row row;
    row.name = j.value("scenario", fs::path(file).stem().string());
    if (j.contains("command")) row.name += " (" + j["command"].get<std::string>() + ")";
    if (j.contains("JP")) row.jp = j["JP"].get<double>();
    if (j.contains("JT")) row.jt = j["JT"].get<double>();
    rows.push_back(row);
  }
  std::string table = "case";
  table.append(table.size() < 40 ? 40 - table.size() : 1, ' ');
  table += "J_P                      J_T\n";
  for (const Row& row : rows) {
    std::string line = row.name;
    line.append(line.size() < 40 ? 40 - line.size() : 1, ' ');
    std::string jp = row.jp ? format_double(*row.jp) : "-";
    jp.append(jp.size() < 25 ? 25 - jp.size() : 1, ' ');
    line += jp;
    line += row.jt ? format_double(*row.jt) : "-";
    table += line + "\n";
  }
  return table;
}

}  // namespace tsg
