// Copyright 2026 The testgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to testgen. All strings are UTF-8. Strings returned through
 * `char**` out-parameters are owned by the caller and released with
 * tg_string_free. On failure a function returns a nonzero tg_status and
 * tg_last_error() describes the problem for the calling thread. */

#ifndef TESTGEN_TESTGEN_C_H_
#define TESTGEN_TESTGEN_C_H_

#include <stddef.h>

#if defined(_WIN32)
#define TG_API __declspec(dllexport)
#else
#define TG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tg_status {
  TG_OK = 0,
  TG_ERR_USAGE = 1,
  TG_ERR_SCHEMA = 2,
  TG_ERR_MISSING_FILE = 3,
  TG_ERR_MISSING_CLASS_UNDER_TEST = 4,
  TG_ERR_PARSE = 5,
  TG_ERR_INFRA = 6,
  TG_ERR_PROVIDER = 7,
  TG_ERR_UNKNOWN_GROUP_FIELD = 8,
  TG_ERR_PRECONDITION = 9,
  TG_ERR_IO = 10,
  TG_ERR_INTERNAL = 11
} tg_status;

typedef enum tg_mode { TG_MODE_DEPLOYMENT = 0, TG_MODE_EVALUATION = 1 } tg_mode;

typedef struct tg_session tg_session;

typedef struct tg_run_summary {
  size_t candidates;
  size_t accepted;
  size_t diffs;
  size_t hints;
  size_t infra_errors;
  size_t configurations;
  size_t warnings;
} tg_run_summary;

TG_API const char* tg_version(void);
TG_API const char* tg_last_error(void);
TG_API void tg_string_free(char* s);

/* A session collects run settings for one manifest. Defaults: deployment
 * mode, the manifest's default model, prompt extend_coverage, temperature
 * 0.0, flaky run count from the manifest, one job, seed "0", output
 * directory "testgen-out". */
TG_API tg_status tg_session_open(const char* manifest_path, tg_session** out);
TG_API void tg_session_close(tg_session* session);

TG_API tg_status tg_session_set_mode(tg_session* session, tg_mode mode);
TG_API tg_status tg_session_add_target(tg_session* session, const char* target_id);
TG_API tg_status tg_session_add_llm(tg_session* session, const char* model_id);
/* A template name, or "all". */
TG_API tg_status tg_session_add_prompt(tg_session* session, const char* name);
TG_API tg_status tg_session_set_temperature(tg_session* session, double temperature);
TG_API tg_status tg_session_set_temp_sweep(tg_session* session, int enabled);
TG_API tg_status tg_session_set_out_dir(tg_session* session, const char* path);
TG_API tg_status tg_session_set_jobs(tg_session* session, int jobs);
TG_API tg_status tg_session_set_runs(tg_session* session, int runs);
TG_API tg_status tg_session_set_seed(tg_session* session, const char* seed);

/* Runs every configured trial. Infrastructure failures during the run are
 * counted in summary->infra_errors and do not fail the call. */
TG_API tg_status tg_session_run(tg_session* session, tg_run_summary* summary);
/* Text report of the last run. */
TG_API tg_status tg_session_report(const tg_session* session, char** text);
/* Warning `index` (< summary.warnings) of the last run. */
TG_API tg_status tg_session_warning(const tg_session* session, size_t index, char** text);

/* Aggregates an existing telemetry file. `group_by` holds `group_count`
 * entries such as "temperature" or "platform_tag,model_id"; `level` is
 * "test_case", "test_class" or NULL. */
TG_API tg_status tg_report(const char* telemetry_path, const char* const* group_by,
                           size_t group_count, const char* level, char** text);

/* Scans `root` for test classes and writes a manifest to `output`. */
TG_API tg_status tg_corpus_scan(const char* root, const char* extension,
                                const char* build_command, const char* test_command,
                                const char* coverage_artifact, const char* output);

/* Renders a built-in template; class_under_test may be NULL. */
TG_API tg_status tg_render_prompt(const char* template_name, const char* test_class,
                                  const char* class_under_test, char** text);

#ifdef __cplusplus
}
#endif

#endif /* TESTGEN_TESTGEN_C_H_ */
