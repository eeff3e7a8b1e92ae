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

// The filtration cascade. Each extracted candidate passes, in order:
//
//   dedup -> build -> pass/flaky gate -> coverage gain
//
// and stops at the first gate it fails. Evaluation mode measures every
// candidate against the original baseline and never changes state;
// deployment mode folds each recommended acceptance into the working
// baseline and the dedup registry before the next candidate is judged.

#ifndef TESTGEN_PIPELINE_H_
#define TESTGEN_PIPELINE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "testgen/corpus.h"
#include "testgen/coverage.h"
#include "testgen/dialect.h"
#include "testgen/exec_backend.h"
#include "testgen/llm_gateway.h"
#include "testgen/promptkit.h"

namespace testgen {

enum class Stage {
  kNoParse,
  kDuplicate,
  kBuildFailed,
  kFailedFirstRun,
  kFlaky,
  kNoCoverageGain,
  kAccepted,
  kInfraError,  // not a funnel stage; counted separately
};

std::string_view stage_name(Stage stage);
Stage parse_stage(std::string_view name);

struct FilterVerdict {
  Stage stage = Stage::kNoParse;
  std::string detail;
};

enum class RunMode { kEvaluation, kDeployment };

std::string_view run_mode_name(RunMode mode);
RunMode parse_run_mode(std::string_view name);

struct Origin {
  std::string model_id;
  std::string prompt_name;
  double temperature = 0.0;
  int sample_index = 0;
  std::string request_id;
};

struct HintFlags {
  bool missing_assertion = false;
  bool todo_marker = false;
  bool integration_like = false;

  friend bool operator==(const HintFlags&, const HintFlags&) = default;
};

HintFlags classify_hints(const TestCase& test);

struct CandidateTest {
  std::string candidate_id;
  std::filesystem::path test_class;
  TestCase test;  // empty name for kNoParse and provider failures
  Origin origin;
  FilterVerdict verdict;
  std::optional<CoverageDelta> delta;  // set once the coverage gate ran
  HintFlags hints;
  // Set for accepted candidates: "", "no_method_annotation", "not_needed",
  // "fruitless" (follow-up round accepted nothing) or "productive".
  std::string reprompt_status;

  bool accepted() const { return verdict.stage == Stage::kAccepted; }
  // Accepted and carrying an assertion; only these become diffs. Accepted
  // candidates without one go to the test-need hints instead.
  bool recommended() const { return accepted() && !hints.missing_assertion; }
};

// Per build target.
struct TargetState {
  std::string baseline_fingerprint;
  CoverageMap original_baseline;
  CoverageMap working_baseline;
  std::set<std::string> registry;  // sha256 of normalized bodies
  std::vector<std::string> accepted_ids;

  bool seen(const TestCase& test) const;
  void remember(const TestCase& test);
};

struct PipelineState {
  std::map<std::string, TargetState> targets;

  nlohmann::json to_json() const;
  static PipelineState from_json(const nlohmann::json& j);
  // Missing file -> empty state.
  static PipelineState load(const std::filesystem::path& path);
  // Write-then-rename.
  void save(const std::filesystem::path& path) const;
};

// Follow-up prompt when the delta covers a nonempty proper subset of the
// method's lines; absent otherwise.
std::optional<std::string> detect_reprompt(const CandidateTest& candidate,
                                           const MethodSpan& method,
                                           std::string_view original_prompt);

struct Contribution {
  std::string model_id;
  std::string prompt_name;
  int accepted_count = 0;  // distinct accepted bodies
  int unique_count = 0;    // of those, bodies no other pair accepted
};

// Pairs in order of first appearance; follow-up rounds count under their
// base prompt name.
std::vector<Contribution> contribution_table(std::span<const CandidateTest> candidates);

struct EnsembleResult {
  std::vector<CandidateTest> candidates;
  std::vector<Contribution> contributions;
};

struct PipelineOptions {
  DialectConfig dialect;
  int flaky_runs = 5;
  std::string seed = "0";
  bool reprompt = true;
  int jobs = 1;  // evaluation-mode trial parallelism
};

class Pipeline {
 public:
  Pipeline(PipelineOptions options, const ProjectManifest& manifest,
           ExecBackend& backend, LlmProvider& provider);

  // Measures baseline coverage (reused when the fingerprint matches) and
  // seeds the dedup registry with the target's existing tests. Throws on
  // infrastructure failure.
  void prepare_target(const BuildTarget& target, PipelineState& state);

  std::vector<CandidateTest> run_trial(const BuildTarget& target,
                                       const TestClassSource& test_class,
                                       const PromptTemplate& tmpl,
                                       const LlmConfig& config, RunMode mode,
                                       PipelineState& state);

  // configs outer, templates inner.
  EnsembleResult ensemble_run(const BuildTarget& target,
                              const TestClassSource& test_class,
                              std::span<const PromptTemplate> templates,
                              std::span<const LlmConfig> configs, RunMode mode,
                              PipelineState& state);

  // Workdir-relative path of the class under test, if mapped.
  std::optional<std::string> class_under_test_key(const BuildTarget& target,
                                                  const std::filesystem::path& test_class) const;

 private:
  std::vector<CandidateTest> run_round(const BuildTarget& target,
                                       const TestClassSource& test_class,
                                       const std::string& prompt,
                                       const std::string& prompt_name,
                                       const LlmConfig& config, RunMode mode,
                                       TargetState& state, bool allow_reprompt);
  void judge(CandidateTest& candidate, const BuildTarget& target,
             const TestClassSource& test_class, RunMode mode, TargetState& state);

  PipelineOptions options_;
  const ProjectManifest& manifest_;
  ExecBackend& backend_;
  LlmProvider& provider_;
};

}  // namespace testgen

#endif  // TESTGEN_PIPELINE_H_
