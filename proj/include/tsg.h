/* tsg — traffic restriction planning with pollution-aware Stackelberg games.
 *
 * C interface of the shared library. All functions are thread-compatible
 * (no shared mutable state between distinct handles). Strings returned
 * through out-parameters are heap-allocated; release them with
 * tsg_string_free.
 */
#ifndef TSG_H
#define TSG_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define TSG_API __declspec(dllexport)
#else
#define TSG_API __attribute__((visibility("default")))
#endif

/* Status codes double as CLI exit codes. */
typedef enum tsg_status {
  TSG_OK = 0,
  TSG_ERR_VALIDATION = 2, /* bad scenario / bad inputs */
  TSG_ERR_NUMERIC = 3,    /* solver failure */
  TSG_BUDGET_EXHAUSTED = 4, /* result produced, budget spent before stall */
  TSG_ERR_IO = 5,
  TSG_ERR_INVALID_ARG = 6
} tsg_status;

/* Opaque scenario handle (parsed, cross-validated, mesh loaded). */
typedef struct tsg_scenario tsg_scenario;

typedef struct tsg_run_options {
  const char* out_dir;      /* NULL: use the scenario's out_dir */
  int64_t seed;             /* honored when has_seed != 0 */
  int has_seed;
  int threads;              /* <= 1: sequential */
  int relaxed;              /* leader bounds [0.2, 0.8] */
  int hybrid_follower;      /* GA stage before the follower polish */
} tsg_run_options;

TSG_API void tsg_run_options_init(tsg_run_options* opts);

/* Loads and validates a scenario file. On failure returns a status code and,
 * when error_json is non-NULL, a machine-readable description:
 *   {"error": {"kind": "...", "message": "..."}} */
TSG_API tsg_status tsg_scenario_load(const char* path, tsg_scenario** out, char** error_json);

TSG_API void tsg_scenario_free(tsg_scenario* scenario);

/* Runs one pipeline command: "simulate", "adjoint", "follower" or
 * "stackelberg". Artifacts are written under the output directory; the run
 * report (JSON) is returned through report_json when non-NULL. On failure
 * report_json carries the error JSON instead. */
TSG_API tsg_status tsg_run(tsg_scenario* scenario, const char* command,
                           const tsg_run_options* opts, char** report_json);

/* Aggregates report/result JSON files into a comparison table (text). */
TSG_API tsg_status tsg_report(const char* const* report_files, int n_files, char** table_text,
                              char** error_json);

TSG_API void tsg_string_free(char* s);

TSG_API const char* tsg_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TSG_H */
