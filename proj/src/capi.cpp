#include "tsg.h"

#include <json.hpp>

#include <cstring>
#include <new>
#include <string>

#include "tsg/runner.hpp"
#include "tsg/scenario.hpp"

struct tsg_scenario {
  tsg::Scenario data;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const char* kind_name(tsg::ErrorKind kind) {
  switch (kind) {
    case tsg::ErrorKind::validation: return "validation";
    case tsg::ErrorKind::config: return "validation";
    case tsg::ErrorKind::numeric: return "numeric";
    case tsg::ErrorKind::io: return "io";
    case tsg::ErrorKind::budget: return "budget";
  }
  return "unknown";
}

tsg_status status_of(tsg::ErrorKind kind) {
  switch (kind) {
    case tsg::ErrorKind::validation: return TSG_ERR_VALIDATION;
    case tsg::ErrorKind::config: return TSG_ERR_VALIDATION;
    case tsg::ErrorKind::numeric: return TSG_ERR_NUMERIC;
    case tsg::ErrorKind::io: return TSG_ERR_IO;
    case tsg::ErrorKind::budget: return TSG_BUDGET_EXHAUSTED;
  }
  return TSG_ERR_NUMERIC;
}

void set_error(char** out, const char* kind, const std::string& message) {
  if (!out) return;
  nlohmann::json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  *out = dup_string(j.dump(2) + "\n");
}

}  // namespace

extern "C" {

void tsg_run_options_init(tsg_run_options* opts) {
  if (!opts) return;
  opts->out_dir = nullptr;
  opts->seed = 0;
  opts->has_seed = 0;
  opts->threads = 1;
  opts->relaxed = 0;
  opts->hybrid_follower = 0;
}

tsg_status tsg_scenario_load(const char* path, tsg_scenario** out, char** error_json) {
  if (error_json) *error_json = nullptr;
  if (!path || !out) {
    set_error(error_json, "validation", "path and out must be non-NULL");
    return TSG_ERR_INVALID_ARG;
  }
  *out = nullptr;
  try {
    auto* handle = new tsg_scenario{tsg::load_scenario(path)};
    *out = handle;
    return TSG_OK;
  } catch (const tsg::Error& e) {
    set_error(error_json, kind_name(e.kind()), e.what());
    return status_of(e.kind());
  } catch (const std::exception& e) {
    set_error(error_json, "numeric", e.what());
    return TSG_ERR_NUMERIC;
  }
}

void tsg_scenario_free(tsg_scenario* scenario) { delete scenario; }

tsg_status tsg_run(tsg_scenario* scenario, const char* command, const tsg_run_options* opts,
                   char** report_json) {
  if (report_json) *report_json = nullptr;
  if (!scenario || !command) {
    set_error(report_json, "validation", "scenario and command must be non-NULL");
    return TSG_ERR_INVALID_ARG;
  }
  tsg_run_options defaults;
  tsg_run_options_init(&defaults);
  const tsg_run_options* o = opts ? opts : &defaults;

  tsg::RunOptions run_opts;
  if (o->out_dir) run_opts.out_dir = o->out_dir;
  if (o->has_seed) run_opts.seed = static_cast<std::uint64_t>(o->seed);
  run_opts.threads = o->threads > 1 ? o->threads : 1;
  run_opts.relaxed = o->relaxed != 0;
  run_opts.hybrid_follower = o->hybrid_follower != 0;

  try {
    tsg::RunReport report = tsg::run_command(command, scenario->data, run_opts);
    if (report_json) *report_json = dup_string(report.to_json());
    return report.budget_exhausted ? TSG_BUDGET_EXHAUSTED : TSG_OK;
  } catch (const tsg::Error& e) {
    set_error(report_json, kind_name(e.kind()), e.what());
    return status_of(e.kind());
  } catch (const std::exception& e) {
    set_error(report_json, "numeric", e.what());
    return TSG_ERR_NUMERIC;
  }
}

tsg_status tsg_report(const char* const* report_files, int n_files, char** table_text,
                      char** error_json) {
  if (table_text) *table_text = nullptr;
  if (error_json) *error_json = nullptr;
  if (!report_files || n_files < 1 || !table_text) {
    set_error(error_json, "validation", "need at least one report file and a table out-param");
    return TSG_ERR_INVALID_ARG;
  }
  try {
    std::vector<std::string> files;
    for (int i = 0; i < n_files; ++i) files.emplace_back(report_files[i]);
    *table_text = dup_string(tsg::build_comparison_table(files));
    return TSG_OK;
  } catch (const tsg::Error& e) {
    set_error(error_json, kind_name(e.kind()), e.what());
    return status_of(e.kind());
  } catch (const std::exception& e) {
    set_error(error_json, "numeric", e.what());
    return TSG_ERR_NUMERIC;
  }
}

void tsg_string_free(char* s) { delete[] s; }

const char* tsg_version(void) { return "0.1.0"; }

}  // extern "C"
