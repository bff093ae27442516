// Command-line front end. Links only the C API (tsg.h) of the shared
// library; everything heavy happens behind the handle.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "tsg.h"

namespace {

struct CommonArgs {
  std::string scenario;
  std::string out_dir;
  std::int64_t seed = 0;
  bool has_seed = false;
  int threads = 1;
  bool relaxed = false;
  bool hybrid_follower = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario JSON file")
      ->required()
      ->envname("TSG_SCENARIO");
  cmd->add_option("--out", args.out_dir, "Output directory (default: scenario's out_dir)")
      ->envname("TSG_OUT");
  cmd->add_option("--seed", args.seed, "RNG seed override")->envname("TSG_SEED");
  cmd->add_option("--threads", args.threads, "Worker threads for fitness evaluations")
      ->envname("TSG_THREADS");
  cmd->add_flag("--relaxed", args.relaxed, "Apply the relaxed 0.2/0.8 restriction bounds");
  cmd->add_flag("--hybrid-follower", args.hybrid_follower,
                "Run the GA stage before the follower local search");
}

int run_pipeline(const char* command, const CommonArgs& args, const CLI::App* cmd) {
  tsg_scenario* scenario = nullptr;
  char* error_json = nullptr;
  tsg_status st = tsg_scenario_load(args.scenario.c_str(), &scenario, &error_json);
  if (st != TSG_OK) {
    std::fprintf(stderr, "%s", error_json ? error_json : "{\"error\":{}}\n");
    tsg_string_free(error_json);
    return static_cast<int>(st);
  }

  tsg_run_options opts;
  tsg_run_options_init(&opts);
  if (!args.out_dir.empty()) opts.out_dir = args.out_dir.c_str();
  if (cmd->count("--seed") > 0 || std::getenv("TSG_SEED")) {
    opts.seed = args.seed;
    opts.has_seed = 1;
  }
  opts.threads = args.threads;
  opts.relaxed = args.relaxed ? 1 : 0;
  opts.hybrid_follower = args.hybrid_follower ? 1 : 0;

  char* report = nullptr;
  st = tsg_run(scenario, command, &opts, &report);
  if (st == TSG_OK || st == TSG_BUDGET_EXHAUSTED) {
    if (report) std::printf("%s", report);
  } else if (report) {
    std::fprintf(stderr, "%s", report);
  }
  tsg_string_free(report);
  tsg_scenario_free(scenario);
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsg — junction restriction planning against traffic pollution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tsg_version()));

  CommonArgs args;
  const char* pipeline_cmds[] = {"simulate", "adjoint", "follower", "stackelberg"};
  const char* descriptions[] = {
      "Run the traffic model with the scenario's fixed controls",
      "Solve the adjoint transport problem once and export it",
      "Solve the drivers' best-response problem at the fixed restrictions",
      "Solve the full bi-level problem (leader GA + local polish)"};
  for (int i = 0; i < 4; ++i) add_common(app.add_subcommand(pipeline_cmds[i], descriptions[i]), args);

  std::vector<std::string> report_files;
  std::string report_out;
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate run reports into a table");
  report_cmd->add_option("files", report_files, "report.json / result files")->required();
  report_cmd->add_option("--out", report_out, "Also write the table to this file");

  CLI11_PARSE(app, argc, argv);

  for (const char* name : pipeline_cmds)
    if (app.got_subcommand(name)) return run_pipeline(name, args, app.get_subcommand(name));

  if (app.got_subcommand("report")) {
    std::vector<const char*> files;
    for (const auto& f : report_files) files.push_back(f.c_str());
    char* table = nullptr;
    char* error_json = nullptr;
    tsg_status st =
        tsg_report(files.data(), static_cast<int>(files.size()), &table, &error_json);
    if (st != TSG_OK) {
      std::fprintf(stderr, "%s", error_json ? error_json : "{\"error\":{}}\n");
      tsg_string_free(error_json);
      return static_cast<int>(st);
    }
    std::printf("%s", table);
    if (!report_out.empty()) {
      std::FILE* f = std::fopen(report_out.c_str(), "w");
      if (f) {
        std::fprintf(f, "%s", table);
        std::fclose(f);
      }
    }
    tsg_string_free(table);
    return 0;
  }
  return 0;
}
