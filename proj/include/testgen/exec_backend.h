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

// Build, run and measure candidate test classes.
//
// A backend works on one scratch workspace per candidate id. build() installs
// the candidate's class text there and compiles it; run_repeated() and
// measure_coverage() reuse that workspace; release() drops it. Files under
// the project root are never written.

#ifndef TESTGEN_EXEC_BACKEND_H_
#define TESTGEN_EXEC_BACKEND_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "testgen/corpus.h"
#include "testgen/coverage.h"
#include "testgen/dialect.h"

namespace testgen {

enum class ExecStatus { kOk, kBuildFailed, kTestFailed, kTimeout };

std::string_view exec_status_name(ExecStatus status);

struct ExecOutcome {
  ExecStatus status = ExecStatus::kOk;
  std::string stdout_excerpt;
  std::string stderr_excerpt;
  std::optional<CoverageMap> coverage;

  bool ok() const { return status == ExecStatus::kOk; }
};

struct RunSeries {
  std::vector<ExecOutcome> outcomes;
  int skipped = 0;  // runs not executed after the first failure
};

enum class RunVerdict { kNonFlaky, kFailedFirstRun, kFlaky };

// kNonFlaky iff `runs` outcomes are present and all ok.
RunVerdict classify_runs(const RunSeries& series, int runs);

struct CandidateSource {
  std::string candidate_id;  // names the scratch workspace
  std::filesystem::path test_class;  // absolute path of the class replaced
  std::string class_text;
  std::string class_name;
  std::optional<TestCase> added_test;  // absent for the unmodified class
};

class ExecBackend {
 public:
  virtual ~ExecBackend() = default;

  virtual ExecOutcome build(const CandidateSource& candidate,
                            const BuildTarget& target) = 0;
  // Stops at the first non-ok outcome.
  virtual RunSeries run_repeated(const CandidateSource& candidate,
                                 const TestCase& test, const BuildTarget& target,
                                 int runs) = 0;
  // Throws ArtifactMissing / ArtifactMalformed, or Error(kInfraError) when
  // the instrumented run itself fails.
  virtual CoverageMap measure_coverage(const CandidateSource& candidate,
                                       const TestCase& test,
                                       const BuildTarget& target) = 0;
  virtual void release(const std::string& candidate_id) { (void)candidate_id; }
  virtual bool parallel_safe() const = 0;
};

// Runs shell commands in a copy of the workdir. Placeholders: {test_name},
// {test_class} (path relative to the workdir), {class_name}, {workdir}
// (the scratch copy). The coverage run gets TESTGEN_COVERAGE=1 and
// TESTGEN_COVERAGE_FILE=<absolute artifact path>; covered paths inside the
// scratch copy are reported relative to it.
class CommandBackend : public ExecBackend {
 public:
  explicit CommandBackend(BackendConfig config);
  ~CommandBackend() override;
  CommandBackend(const CommandBackend&) = delete;
  CommandBackend& operator=(const CommandBackend&) = delete;

  ExecOutcome build(const CandidateSource& candidate,
                    const BuildTarget& target) override;
  RunSeries run_repeated(const CandidateSource& candidate, const TestCase& test,
                         const BuildTarget& target, int runs) override;
  CoverageMap measure_coverage(const CandidateSource& candidate,
                               const TestCase& test,
                               const BuildTarget& target) override;
  void release(const std::string& candidate_id) override;
  bool parallel_safe() const override { return config_.parallel_safe; }

  std::filesystem::path scratch_dir(const std::string& candidate_id) const;

 private:
  std::string expand(const std::string& command, const CandidateSource& candidate,
                     const TestCase* test) const;
  ExecOutcome run_once(const CandidateSource& candidate, const TestCase& test,
                       const BuildTarget& target);

  BackendConfig config_;
  std::filesystem::path scratch_root_;
  bool owns_scratch_root_ = false;
  std::mutex serial_;
};

// Scripted outcomes. Script:
//   {"default": {...}, "rules": [{"test_name": "t", "body_contains": "x",
//     "build": "ok"|"fail"|"timeout", "runs": ["pass", "fail", ...],
//     "coverage": {"file": [lines]}}]}
// The first rule whose matchers accept the test applies; unmatched fields
// fall back to the default. The last runs entry repeats.
struct MockRule {
  std::optional<std::string> test_name;
  std::optional<std::string> body_contains;
  std::string build = "ok";
  std::vector<std::string> runs = {"pass"};
  CoverageMap coverage;
};

class MockBackend : public ExecBackend {
 public:
  MockBackend(MockRule fallback, std::vector<MockRule> rules);
  explicit MockBackend(const nlohmann::json& script);
  static MockBackend from_json(const nlohmann::json& script) {
    return MockBackend(script);
  }

  ExecOutcome build(const CandidateSource& candidate,
                    const BuildTarget& target) override;
  RunSeries run_repeated(const CandidateSource& candidate, const TestCase& test,
                         const BuildTarget& target, int runs) override;
  CoverageMap measure_coverage(const CandidateSource& candidate,
                               const TestCase& test,
                               const BuildTarget& target) override;
  bool parallel_safe() const override { return true; }

  // "build:<id>", "run:<id>:<test>", "coverage:<id>:<test>".
  std::vector<std::string> calls() const;
  std::size_t calls_for(const std::string& candidate_id) const;

 private:
  const MockRule& rule_for(const TestCase& test) const;
  void log(std::string entry);

  MockRule fallback_;
  std::vector<MockRule> rules_;
  mutable std::mutex mu_;
  std::vector<std::string> calls_;
};

std::unique_ptr<ExecBackend> make_backend(const BackendConfig& config);

}  // namespace testgen

#endif  // TESTGEN_EXEC_BACKEND_H_
