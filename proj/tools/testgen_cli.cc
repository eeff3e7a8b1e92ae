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

// testgen command-line interface. Links only the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "testgen/testgen_c.h"

namespace {

constexpr int kExitInfra = 1;
constexpr int kExitUsage = 2;

struct RunFlags {
  std::string manifest;
  std::vector<std::string> targets;
  std::vector<std::string> llms;
  std::vector<std::string> prompts;
  std::optional<double> temp;
  bool temp_sweep = false;
  std::string mode;
  std::string out = "testgen-out";
  int jobs = 1;
  std::optional<int> runs;
  std::string seed = "0";
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--manifest", f.manifest, "Project manifest (JSON)")->required();
  cmd->add_option("--target", f.targets, "Build target id (repeatable)");
  cmd->add_option("--llm", f.llms, "Model id (repeatable; several form an ensemble)");
  cmd->add_option("--prompt", f.prompts, "Prompt template name or 'all' (repeatable)");
  auto* temp = cmd->add_option("--temp", f.temp, "Sampling temperature")
                   ->check(CLI::Range(0.0, 2.0));
  cmd->add_flag("--temp-sweep", f.temp_sweep, "Sweep temperature 0.0..1.0 in 0.1 steps")
      ->excludes(temp);
  cmd->add_option("--mode", f.mode, "deployment or evaluation (implied by the command)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--jobs", f.jobs, "Worker parallelism")->check(CLI::PositiveNumber);
  cmd->add_option("--runs", f.runs, "Executions required to pass (flakiness check)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Seed for deterministic candidate ids");
}

int fail(tg_status status) {
  std::cerr << "testgen: " << tg_last_error() << "\n";
  switch (status) {
    case TG_ERR_USAGE:
    case TG_ERR_SCHEMA:
    case TG_ERR_MISSING_FILE:
    case TG_ERR_UNKNOWN_GROUP_FIELD:
      return kExitUsage;
    default:
      return kExitInfra;
  }
}

class Session {
 public:
  explicit Session(tg_session* s) : s_(s) {}
  ~Session() { tg_session_close(s_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  tg_session* get() const { return s_; }

 private:
  tg_session* s_;
};

std::string take(char* text) {
  std::string out = text ? text : "";
  tg_string_free(text);
  return out;
}

int run(const RunFlags& f, tg_mode mode, const char* command) {
  if (!f.mode.empty()) {
    bool deploy = f.mode == "deployment" || f.mode == "deploy";
    bool eval = f.mode == "evaluation" || f.mode == "eval";
    if (!deploy && !eval) {
      std::cerr << "testgen: --mode: unknown mode '" << f.mode << "'\n";
      return kExitUsage;
    }
    if (deploy != (mode == TG_MODE_DEPLOYMENT)) {
      std::cerr << "testgen: --mode: '" << f.mode << "' conflicts with command " << command
                << "\n";
      return kExitUsage;
    }
  }
  tg_session* raw = nullptr;
  if (tg_status st = tg_session_open(f.manifest.c_str(), &raw)) return fail(st);
  Session session(raw);
  tg_session* s = session.get();
  tg_status st = tg_session_set_mode(s, mode);
  for (const auto& t : f.targets) st = st ? st : tg_session_add_target(s, t.c_str());
  for (const auto& m : f.llms) st = st ? st : tg_session_add_llm(s, m.c_str());
  for (const auto& p : f.prompts) st = st ? st : tg_session_add_prompt(s, p.c_str());
  if (!st && f.temp) st = tg_session_set_temperature(s, *f.temp);
  if (!st) st = tg_session_set_temp_sweep(s, f.temp_sweep ? 1 : 0);
  if (!st) st = tg_session_set_out_dir(s, f.out.c_str());
  if (!st) st = tg_session_set_jobs(s, f.jobs);
  if (!st && f.runs) st = tg_session_set_runs(s, *f.runs);
  if (!st) st = tg_session_set_seed(s, f.seed.c_str());
  if (st) return fail(st);

  tg_run_summary summary{};
  if ((st = tg_session_run(s, &summary))) return fail(st);
  char* text = nullptr;
  if ((st = tg_session_report(s, &text))) return fail(st);
  std::cout << take(text);
  for (size_t i = 0; i < summary.warnings; ++i) {
    if (tg_session_warning(s, i, &text) == TG_OK) std::cerr << "warning: " << take(text) << "\n";
  }
  return summary.infra_errors > 0 ? kExitInfra : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extend unit-test classes with generated, filtered test cases"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tg_version()));

  RunFlags extend_flags, eval_flags;
  auto* extend = app.add_subcommand("extend", "Generate, filter and emit one diff per accepted test");
  add_run_flags(extend, extend_flags);
  auto* eval = app.add_subcommand("eval", "Measure candidates against a fixed baseline (no diffs)");
  add_run_flags(eval, eval_flags);

  std::string telemetry, level;
  std::vector<std::string> group_by;
  auto* report = app.add_subcommand("report", "Aggregate an existing telemetry file");
  report->add_option("--telemetry", telemetry, "Telemetry JSONL file")->required();
  report->add_option("--group-by", group_by,
                     "temperature, model_id, prompt_name, platform_tag or a comma list");
  report->add_option("--level", level, "Funnel level: test_case or test_class");

  std::string scan_root, scan_out = "manifest.json", ext = ".kt", build_cmd, test_cmd, artifact;
  auto* scan = app.add_subcommand("corpus-scan", "Write a manifest for a test tree");
  scan->add_option("--root", scan_root, "Directory to scan")->required();
  scan->add_option("--out", scan_out, "Manifest to write");
  scan->add_option("--ext", ext, "Source file extension");
  scan->add_option("--build-command", build_cmd, "Build command template");
  scan->add_option("--test-command", test_cmd, "Test command template");
  scan->add_option("--coverage-artifact", artifact, "Coverage artifact path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*extend) return run(extend_flags, TG_MODE_DEPLOYMENT, "extend");
  if (*eval) return run(eval_flags, TG_MODE_EVALUATION, "eval");
  if (*report) {
    std::vector<const char*> groups;
    for (const auto& g : group_by) groups.push_back(g.c_str());
    char* text = nullptr;
    tg_status st = tg_report(telemetry.c_str(), groups.data(), groups.size(),
                             level.empty() ? nullptr : level.c_str(), &text);
    if (st) return fail(st);
    std::cout << take(text);
    return 0;
  }
  tg_status st = tg_corpus_scan(scan_root.c_str(), ext.c_str(), build_cmd.c_str(),
                                test_cmd.c_str(), artifact.c_str(), scan_out.c_str());
  if (st) return fail(st);
  std::cout << "wrote " << scan_out << "\n";
  return 0;
}
