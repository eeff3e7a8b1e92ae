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

#include "testgen/testgen_c.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "testgen/error.h"
#include "testgen/promptkit.h"
#include "testgen/workflow.h"

struct tg_session {
  testgen::WorkflowOptions options;
  testgen::WorkflowSummary last;
};

namespace {

thread_local std::string last_error;

tg_status status_for(testgen::ErrorCode code) {
  using testgen::ErrorCode;
  switch (code) {
    case ErrorCode::kUsage: return TG_ERR_USAGE;
    case ErrorCode::kSchemaError: return TG_ERR_SCHEMA;
    case ErrorCode::kMissingFile: return TG_ERR_MISSING_FILE;
    case ErrorCode::kMissingClassUnderTest: return TG_ERR_MISSING_CLASS_UNDER_TEST;
    case ErrorCode::kUnbalancedBraces:
    case ErrorCode::kNoClassFound:
    case ErrorCode::kDuplicateTestName:
    case ErrorCode::kNoParseableClass:
    case ErrorCode::kNameCollision:
      return TG_ERR_PARSE;
    case ErrorCode::kProviderTimeout:
    case ErrorCode::kProviderError:
    case ErrorCode::kCassetteMiss:
      return TG_ERR_PROVIDER;
    case ErrorCode::kInfraError:
    case ErrorCode::kArtifactMissing:
    case ErrorCode::kArtifactMalformed:
      return TG_ERR_INFRA;
    case ErrorCode::kUnknownGroupField: return TG_ERR_UNKNOWN_GROUP_FIELD;
    case ErrorCode::kPreconditionViolation: return TG_ERR_PRECONDITION;
    case ErrorCode::kIoError: return TG_ERR_IO;
  }
  return TG_ERR_INTERNAL;
}

template <typename F>
tg_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TG_OK;
  } catch (const testgen::Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return TG_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return TG_ERR_INTERNAL;
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool condition, const char* what) {
  if (!condition) throw testgen::Error(testgen::ErrorCode::kUsage, what);
}

}  // namespace

extern "C" {

const char* tg_version(void) { return "0.1.0"; }

const char* tg_last_error(void) { return last_error.c_str(); }

void tg_string_free(char* s) { std::free(s); }

tg_status tg_session_open(const char* manifest_path, tg_session** out) {
  return guarded([&] {
    require(manifest_path && out, "manifest path and session pointer are required");
    auto session = std::make_unique<tg_session>();
    session->options.manifest = manifest_path;
    *out = session.release();
  });
}

void tg_session_close(tg_session* session) { delete session; }

tg_status tg_session_set_mode(tg_session* session, tg_mode mode) {
  return guarded([&] {
    require(session, "session is required");
    require(mode == TG_MODE_DEPLOYMENT || mode == TG_MODE_EVALUATION, "--mode: unknown mode");
    session->options.mode =
        mode == TG_MODE_DEPLOYMENT ? testgen::RunMode::kDeployment : testgen::RunMode::kEvaluation;
  });
}

tg_status tg_session_add_target(tg_session* session, const char* target_id) {
  return guarded([&] {
    require(session && target_id, "--target: value required");
    session->options.targets.emplace_back(target_id);
  });
}

tg_status tg_session_add_llm(tg_session* session, const char* model_id) {
  return guarded([&] {
    require(session && model_id && *model_id, "--llm: value required");
    session->options.models.emplace_back(model_id);
  });
}

tg_status tg_session_add_prompt(tg_session* session, const char* name) {
  return guarded([&] {
    require(session && name && *name, "--prompt: value required");
    session->options.prompts.emplace_back(name);
  });
}

tg_status tg_session_set_temperature(tg_session* session, double temperature) {
  return guarded([&] {
    require(session, "session is required");
    require(temperature >= 0.0 && temperature <= 2.0, "--temp: temperature must lie in [0, 2]");
    session->options.temperature = temperature;
  });
}

tg_status tg_session_set_temp_sweep(tg_session* session, int enabled) {
  return guarded([&] {
    require(session, "session is required");
    session->options.temp_sweep = enabled != 0;
  });
}

tg_status tg_session_set_out_dir(tg_session* session, const char* path) {
  return guarded([&] {
    require(session && path && *path, "--out: value required");
    session->options.out_dir = path;
  });
}

tg_status tg_session_set_jobs(tg_session* session, int jobs) {
  return guarded([&] {
    require(session, "session is required");
    require(jobs >= 1, "--jobs: must be at least 1");
    session->options.jobs = jobs;
  });
}

tg_status tg_session_set_runs(tg_session* session, int runs) {
  return guarded([&] {
    require(session, "session is required");
    require(runs >= 1, "--runs: must be at least 1");
    session->options.runs = runs;
  });
}

tg_status tg_session_set_seed(tg_session* session, const char* seed) {
  return guarded([&] {
    require(session && seed, "--seed: value required");
    session->options.seed = seed;
  });
}

tg_status tg_session_run(tg_session* session, tg_run_summary* summary) {
  return guarded([&] {
    require(session, "session is required");
    session->last = testgen::run_workflow(session->options);
    if (summary) {
      const auto& s = session->last;
      *summary = tg_run_summary{s.candidates, s.accepted, s.diffs, s.hints,
                                s.infra_errors, s.configurations, s.warnings.size()};
    }
  });
}

tg_status tg_session_report(const tg_session* session, char** text) {
  return guarded([&] {
    require(session && text, "session and output are required");
    *text = duplicate(session->last.report);
  });
}

tg_status tg_session_warning(const tg_session* session, size_t index, char** text) {
  return guarded([&] {
    require(session && text, "session and output are required");
    require(index < session->last.warnings.size(), "warning index out of range");
    *text = duplicate(session->last.warnings[index]);
  });
}

tg_status tg_report(const char* telemetry_path, const char* const* group_by,
                    size_t group_count, const char* level, char** text) {
  return guarded([&] {
    require(telemetry_path && *telemetry_path, "--telemetry: value required");
    require(text, "output is required");
    require(group_count == 0 || group_by, "group list is required");
    testgen::ReportOptions options;
    options.telemetry = telemetry_path;
    for (size_t i = 0; i < group_count; ++i) {
      require(group_by[i], "--group-by: value required");
      options.group_by.emplace_back(group_by[i]);
    }
    if (level) options.level = testgen::parse_funnel_level(level);
    *text = duplicate(testgen::run_report(options));
  });
}

tg_status tg_corpus_scan(const char* root, const char* extension, const char* build_command,
                         const char* test_command, const char* coverage_artifact,
                         const char* output) {
  return guarded([&] {
    require(root && output, "root and output are required");
    testgen::ScanOptions scan;
    if (extension) scan.extension = extension;
    if (build_command) scan.build_command = build_command;
    if (test_command) scan.test_command = test_command;
    if (coverage_artifact) scan.coverage_artifact = coverage_artifact;
    testgen::run_corpus_scan(root, scan, output);
  });
}

tg_status tg_render_prompt(const char* template_name, const char* test_class,
                           const char* class_under_test, char** text) {
  return guarded([&] {
    require(template_name && test_class && text, "template, test class and output are required");
    const testgen::PromptTemplate* tmpl = testgen::find_builtin_template(template_name);
    if (!tmpl) {
      throw testgen::Error(testgen::ErrorCode::kUsage,
                           std::string("--prompt: unknown template '") + template_name + "'");
    }
    std::optional<std::string> cut;
    if (class_under_test) cut = class_under_test;
    *text = duplicate(testgen::render(*tmpl, test_class, cut));
  });
}

}  // extern "C"
