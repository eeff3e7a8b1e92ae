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

// The extend / eval / report / corpus-scan workflows behind the CLI.
//
// Output directory layout:
//   telemetry.jsonl   one TrialRecord per candidate (appended)
//   report.txt        funnel, success rates, contributions, hints
//   sankey.txt        flow rows for this run
//   diffs/            extend only: <id>.diff and <id>.json per accepted test
//   hints.txt         extend only: accepted tests without an assertion
//   state.json        extend only: accumulated baselines and dedup registry

#ifndef TESTGEN_WORKFLOW_H_
#define TESTGEN_WORKFLOW_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "testgen/corpus.h"
#include "testgen/llm_gateway.h"
#include "testgen/pipeline.h"
#include "testgen/telemetry.h"

namespace testgen {

inline constexpr const char* kDefaultPrompt = "extend_coverage";

struct WorkflowOptions {
  std::filesystem::path manifest;
  RunMode mode = RunMode::kDeployment;
  std::vector<std::string> targets;  // empty: all targets
  std::vector<std::string> models;   // empty: the manifest's default model
  std::vector<std::string> prompts;  // empty: extend_coverage; "all": every template
  std::optional<double> temperature;
  bool temp_sweep = false;
  std::filesystem::path out_dir = "testgen-out";
  int jobs = 1;
  std::optional<int> runs;  // falls back to the manifest's flaky_runs
  std::string seed = "0";
  // Timestamp source for telemetry; utc_timestamp when empty.
  std::function<std::string()> clock;
};

struct WorkflowSummary {
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  std::size_t diffs = 0;
  std::size_t hints = 0;
  std::size_t infra_errors = 0;
  std::size_t configurations = 0;  // (model, temperature, prompt) per class
  std::vector<std::string> warnings;
  std::string report;

  int exit_code() const { return infra_errors > 0 ? 1 : 0; }
};

std::shared_ptr<LlmProvider> make_provider(const LlmSettings& settings);

// Throws SchemaError / Error(kMissingFile | kUsage) for manifest and usage
// problems; infrastructure failures are counted, not thrown.
WorkflowSummary run_workflow(const WorkflowOptions& options);

struct ReportOptions {
  std::filesystem::path telemetry;
  std::vector<std::string> group_by;   // one table per entry
  std::optional<FunnelLevel> level;    // funnel at this level only
};

// Funnels at both levels and the Sankey rows when neither group_by nor
// level is given.
std::string run_report(const ReportOptions& options);

// Writes the scanned manifest to `output`.
void run_corpus_scan(const std::filesystem::path& root, const ScanOptions& scan,
                     const std::filesystem::path& output);

}  // namespace testgen

#endif  // TESTGEN_WORKFLOW_H_
