#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsg/scenario.hpp"

namespace tsg {

struct RunOptions {
  std::string out_dir;                   // overrides the scenario's when set
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool relaxed = false;                  // leader bounds become [0.2, 0.8]
  bool hybrid_follower = false;
};

struct RunReport {
  std::string command;
  std::string scenario;
  std::optional<double> jt;
  std::optional<double> jp;
  double wall_time_s = 0.0;
  long simulations = 0;
  long jt_evals = 0;
  long jp_evals = 0;
  long follower_solves = 0;
  long follower_cache_hits = 0;
  long adjoint_solves = 0;
  bool adjoint_cache_hit = false;
  bool budget_exhausted = false;
  std::vector<std::string> artifacts;

  std::string to_json() const;
};

/// Executes one pipeline command (simulate | adjoint | follower |
/// stackelberg) and writes its artifacts plus report.json under the output
/// directory. Never mutates the scenario file.
RunReport run_command(const std::string& command, const Scenario& scenario,
                      const RunOptions& opts);

/// Aggregates run reports into a comparison table (text), ordered as given.
std::string build_comparison_table(const std::vector<std::string>& report_files);

}  // namespace tsg
