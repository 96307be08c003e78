/* foliashadow: foliation-relative dynamics experiments on flat tori.
 *
 * C interface to the scenario engine: load or pick a scenario, run one of
 * the analysis pipelines, and read back the JSON report. All functions
 * return fs_status; string outputs stay owned by the library.
 */
#ifndef FOLIASHADOW_H
#define FOLIASHADOW_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fs_status {
  FS_OK = 0,
  FS_ERR_INVALID_ARGUMENT = 1,
  FS_ERR_CONFIG = 2,
  FS_ERR_VERIFICATION_FAILED = 3,
  FS_ERR_NOT_FOUND = 4,
  FS_ERR_UNSUPPORTED = 5,
  FS_ERR_INTERNAL = 6
} fs_status;

/* Opaque scenario handle. */
typedef struct fs_scenario fs_scenario;

/* Scenario creation. The file/text form accepts JSON (leading '{') or
 * key = value lines with [section] headers. */
fs_status fs_scenario_from_file(const char* path, fs_scenario** out);
fs_status fs_scenario_from_text(const char* text, fs_scenario** out);
fs_status fs_scenario_builtin(const char* name, fs_scenario** out);
void fs_scenario_free(fs_scenario* scenario);

fs_status fs_scenario_set_seed(fs_scenario* scenario, uint64_t seed);
fs_status fs_scenario_set_output_dir(fs_scenario* scenario, const char* dir);

/* pipeline: "cr-set" | "shadow" | "semiconj" | "expansivity-scan" |
 * "quotient" | "all". Report files are written under the output directory.
 * FS_OK means every check passed; FS_ERR_VERIFICATION_FAILED means the run
 * completed but a check failed (the report has details). */
fs_status fs_scenario_run(fs_scenario* scenario, const char* pipeline);

/* JSON report of the last completed run, or NULL before any run. Owned by
 * the handle; valid until the next run or free. */
const char* fs_scenario_report(const fs_scenario* scenario);

/* Message describing the most recent failure on this thread. */
const char* fs_last_error(void);

/* Newline-separated "name: description" lines; static storage. */
const char* fs_list_builtin_scenarios(void);

const char* fs_version(void);

/* Distance on the flat torus T^dim (coordinates are taken mod 1). */
fs_status fs_torus_distance(const double* a, const double* b, int dim,
                            double* out);

#ifdef __cplusplus
}
#endif

#endif /* FOLIASHADOW_H */
