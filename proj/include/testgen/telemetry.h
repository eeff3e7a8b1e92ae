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

// Trial telemetry (JSON Lines), funnel and success-rate aggregation, Sankey
// export and one-test-per-diff improvement reports.

#ifndef TESTGEN_TELEMETRY_H_
#define TESTGEN_TELEMETRY_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "testgen/coverage.h"
#include "testgen/dialect.h"
#include "testgen/pipeline.h"

namespace testgen {

struct TrialRecord {
  std::string timestamp;
  std::string target_id;
  std::string test_class_path;
  std::string model_id;
  std::string prompt_name;
  double temperature = 0.0;
  int sample_index = 0;
  Stage stage_reached = Stage::kNoParse;
  std::size_t total_new_lines = 0;
  std::size_t new_files_count = 0;
  std::size_t extended_files_count = 0;
  HintFlags hint_flags;
  RunMode mode = RunMode::kEvaluation;

  std::string candidate_id;
  std::string test_name;
  std::string request_id;
  std::string platform_tag;
  std::string detail;
  std::string reprompt_status;
  std::optional<CoverageDelta> delta;
};

nlohmann::json to_json(const TrialRecord& record);
TrialRecord trial_record_from_json(const nlohmann::json& j);

// "2026-01-31T12:00:00Z"
std::string utc_timestamp();

TrialRecord make_trial_record(const CandidateTest& candidate,
                              const std::string& target_id,
                              const std::string& test_class_path,
                              const std::string& platform_tag, RunMode mode,
                              std::string timestamp);

// Appends whole lines; safe to share between threads.
class TelemetryWriter {
 public:
  explicit TelemetryWriter(const std::filesystem::path& path);
  void append(const TrialRecord& record);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mu_;
};

// Throws SchemaError naming the offending line.
std::vector<TrialRecord> read_telemetry(const std::filesystem::path& path);
std::vector<TrialRecord> parse_telemetry(std::string_view text);

// --- aggregation ---------------------------------------------------------------

// Half-up rounding to hundredths using integer arithmetic; t > 0.
long long rate_hundredths(std::size_t successes, std::size_t total);
// "0.05"; "-" when total == 0.
std::string format_rate(std::size_t successes, std::size_t total);

enum class FunnelLevel { kTestCase, kTestClass };

FunnelLevel parse_funnel_level(std::string_view name);

struct FunnelStage {
  std::string name;  // generated, built, passed, non_flaky, improves
  std::size_t count = 0;
  std::optional<double> fraction;  // count / total; absent when total == 0
};

struct FunnelStats {
  FunnelLevel level = FunnelLevel::kTestCase;
  std::size_t total = 0;        // candidates or test classes
  std::size_t infra_errors = 0;  // records left out of every count
  std::vector<FunnelStage> stages;
  std::size_t successes = 0;  // accepted candidates
  std::size_t trials = 0;     // candidates

  const FunnelStage& stage(std::string_view name) const;
};

// Records with stage infra_error are counted separately and excluded.
FunnelStats funnel_stats(std::span<const TrialRecord> records, FunnelLevel level);

struct SuccessRow {
  std::vector<std::string> group;
  std::size_t successes = 0;
  std::size_t trials = 0;
  std::string rate;
};

struct SuccessTable {
  std::vector<std::string> fields;
  std::vector<SuccessRow> rows;
};

// group_by: temperature, model_id, prompt_name, platform_tag, or a
// comma-separated combination. Temperature sorts descending, everything
// else ascending. Throws Error(kUnknownGroupField).
SuccessTable success_table(std::span<const TrialRecord> records,
                           std::string_view group_by);

// Rows "source [percent] target" for every nonzero stage transition.
std::string sankey_export(std::span<const TrialRecord> records);

std::string format_funnel(const FunnelStats& stats);
std::string format_success_table(const SuccessTable& table);
std::string format_contributions(std::span<const Contribution> rows);

// --- diffs ---------------------------------------------------------------------

inline constexpr std::string_view kMachineMarker = "[testgen: machine-generated]";

struct ImprovementDiff {
  std::string diff_id;
  std::string target_id;
  std::string test_class_path;
  std::string test_name;
  std::string new_class_text;
  std::string unified_diff;
  std::string summary;
  bool integration_like = false;
  CoverageDelta delta;
  Origin origin;

  nlohmann::json sidecar() const;
};

// Throws Error(kPreconditionViolation) unless the candidate was accepted
// with a delta; NameCollision from reassembly propagates.
ImprovementDiff emit_diff(const CandidateTest& accepted,
                          const TestClassSource& original,
                          const std::string& target_id,
                          const std::string& test_class_path,
                          const std::optional<std::string>& class_under_test = std::nullopt);

std::string coverage_summary(const std::string& test_name, const CoverageDelta& delta,
                             const TestClassSource& original,
                             const std::string& test_class_path,
                             const std::optional<std::string>& class_under_test);

// Single-hunk unified diff; `a/` and `b/` prefixes on the path.
std::string unified_diff(std::string_view before, std::string_view after,
                         const std::string& path, int context = 3);

// <dir>/<diff_id>.diff and <dir>/<diff_id>.json
void write_diff(const std::filesystem::path& dir, const ImprovementDiff& diff);

// One entry of the test-need hints report.
std::string format_hint(const CandidateTest& candidate, const std::string& test_class_path);

}  // namespace testgen

#endif  // TESTGEN_TELEMETRY_H_
