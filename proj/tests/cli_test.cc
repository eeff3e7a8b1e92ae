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

#include <set>
#include <tuple>

#include "cli_harness.h"
#include "gtest/gtest.h"
#include "pipeline_harness.h"
#include "record_fixtures.h"
#include "testgen/telemetry.h"
#include "testgen/testgen_c.h"

namespace testgen {
namespace {

namespace fs = std::filesystem;
using test_util::extended_class;
using test_util::fenced;
using test_util::Harness;
using test_util::kFooTestClass;
using test_util::run_cli;
using test_util::stub_any;
using test_util::test_fn;

nlohmann::json mock_gain() {
  return {{"default", {{"build", "ok"}, {"runs", {"pass"}}, {"coverage", {{"src/Foo.kt", {2}}}}}},
          {"rules",
           {{{"test_name", "existing"}, {"coverage", {{"src/Foo.kt", {2}}}}},
            {{"body_contains", "mark3()"}, {"coverage", {{"src/Foo.kt", {2, 3}}}}}}}};
}

std::string gaining_response() {
  return fenced(extended_class(kFooTestClass, {test_fn("coversThree", "assertEquals(3, Foo().mark3())")}));
}

std::string without_timestamps(const fs::path& telemetry) {
  std::string out;
  for (const TrialRecord& r : read_telemetry(telemetry)) {
    nlohmann::json j = to_json(r);
    j.erase("timestamp");
    out += j.dump() + "\n";
  }
  return out;
}

TEST(Cli, ExtendDefaults) {
  Harness h(mock_gain(), stub_any({gaining_response()}));
  fs::path out = h.root() / "out";
  auto r = run_cli({"extend", "--manifest", (h.root() / "manifest.json").string(), "--out",
                    out.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto records = read_telemetry(out / "telemetry.jsonl");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].prompt_name, "extend_coverage");
  EXPECT_EQ(records[0].temperature, 0.0);
  EXPECT_EQ(records[0].model_id, "LLM2");
  EXPECT_EQ(records[0].mode, RunMode::kDeployment);
  EXPECT_EQ(records[0].stage_reached, Stage::kAccepted);
  EXPECT_EQ(records[0].test_class_path, "tests/FooTest.kt");
  EXPECT_TRUE(fs::exists(out / "state.json"));
  EXPECT_TRUE(fs::exists(out / ("diffs/" + records[0].candidate_id + ".diff")));
  EXPECT_NE(r.out.find("diffs: 1"), std::string::npos);
}

TEST(Cli, EvalSweepOverAllPromptsAndTwoModels) {
  Harness h(mock_gain(), stub_any({"no code here"}));
  fs::path out = h.root() / "out";
  auto r = run_cli({"eval", "--manifest", (h.root() / "manifest.json").string(), "--temp-sweep",
                    "--prompt", "all", "--llm", "LLM1", "--llm", "LLM2", "--out", out.string(),
                    "--jobs", "4"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto records = read_telemetry(out / "telemetry.jsonl");
  std::set<std::tuple<std::string, std::string, std::string>> configs;
  for (const auto& rec : records) {
    configs.emplace(rec.model_id, format_temperature(rec.temperature), rec.prompt_name);
    EXPECT_EQ(rec.mode, RunMode::kEvaluation);
  }
  EXPECT_EQ(configs.size(), 11u * 4u * 2u);
  EXPECT_EQ(records.size(), 88u);
  EXPECT_FALSE(fs::exists(out / "state.json"));
  EXPECT_FALSE(fs::exists(out / "diffs"));
  EXPECT_TRUE(fs::exists(out / "sankey.txt"));
}

TEST(Cli, EvalIsIndependentOfJobCount) {
  std::vector<std::string> responses = {gaining_response(), "nothing"};
  Harness h(mock_gain(), stub_any(responses));
  std::string manifest = (h.root() / "manifest.json").string();
  auto a = run_cli({"eval", "--manifest", manifest, "--prompt", "all", "--temp-sweep", "--out",
                    (h.root() / "a").string(), "--jobs", "1"});
  auto b = run_cli({"eval", "--manifest", manifest, "--prompt", "all", "--temp-sweep", "--out",
                    (h.root() / "b").string(), "--jobs", "8"});
  ASSERT_EQ(a.exit_code, 0) << a.err;
  ASSERT_EQ(b.exit_code, 0) << b.err;
  EXPECT_EQ(without_timestamps(h.root() / "a/telemetry.jsonl"),
            without_timestamps(h.root() / "b/telemetry.jsonl"));
  EXPECT_EQ(test_util::read_file(h.root() / "a/report.txt"),
            test_util::read_file(h.root() / "b/report.txt"));
}

TEST(Cli, ReportByTemperature) {
  test_util::TempDir dir;
  std::vector<TrialRecord> records;
  fixtures::append_rows(records, 4, 552, 0.1);
  fixtures::append_rows(records, 1215, 30483, 0.0);
  fixtures::append_rows(records, 16, 334, 0.4);
  {
    TelemetryWriter w(dir.path() / "t.jsonl");
    for (const auto& r : records) w.append(r);
  }
  auto r = run_cli({"report", "--telemetry", (dir.path() / "t.jsonl").string(), "--group-by",
                    "temperature"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out,
            "temperature  successes  trials  rate\n"
            "0.4          16         334     0.05\n"
            "0.1          4          552     0.01\n"
            "0.0          1215       30483   0.04\n");

  auto bad = run_cli({"report", "--telemetry", (dir.path() / "t.jsonl").string(), "--group-by",
                      "colour"});
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_NE(bad.err.find("colour"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwoAndNameTheFlag) {
  Harness h(mock_gain(), stub_any({"x"}));
  std::string manifest = (h.root() / "manifest.json").string();
  std::string out = (h.root() / "out").string();

  auto missing = run_cli({"extend"});
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_NE(missing.err.find("--manifest"), std::string::npos);

  auto prompt = run_cli({"eval", "--manifest", manifest, "--prompt", "haiku", "--out", out});
  EXPECT_EQ(prompt.exit_code, 2);
  EXPECT_NE(prompt.err.find("--prompt"), std::string::npos);

  auto mode = run_cli({"extend", "--manifest", manifest, "--mode", "evaluation", "--out", out});
  EXPECT_EQ(mode.exit_code, 2);
  EXPECT_NE(mode.err.find("--mode"), std::string::npos);

  auto both = run_cli({"eval", "--manifest", manifest, "--temp", "0.3", "--temp-sweep"});
  EXPECT_EQ(both.exit_code, 2);
  EXPECT_NE(both.err.find("--temp"), std::string::npos);

  auto runs = run_cli({"eval", "--manifest", manifest, "--runs", "0"});
  EXPECT_EQ(runs.exit_code, 2);
  EXPECT_NE(runs.err.find("--runs"), std::string::npos);

  auto target = run_cli({"eval", "--manifest", manifest, "--target", "nope", "--out", out});
  EXPECT_EQ(target.exit_code, 2);
  EXPECT_NE(target.err.find("--target"), std::string::npos);
}

TEST(Cli, ManifestErrorsExitTwo) {
  test_util::TempDir dir;
  test_util::write_file(dir.path() / "m.json", R"({"root": ".", "dialect": {},
    "backend": {"kind": "mock", "flaky_runs": 0}, "targets": []})");
  auto r = run_cli({"eval", "--manifest", (dir.path() / "m.json").string(), "--out",
                    (dir.path() / "out").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("backend.flaky_runs"), std::string::npos) << r.err;
}

TEST(Cli, InfraErrorExitsOne) {
  Harness h(mock_gain(), stub_any({"x"}));
  nlohmann::json m = nlohmann::json::parse(test_util::read_file(h.root() / "manifest.json"));
  m["llm"] = {{"provider", "replay"}, {"cassette", "empty.jsonl"}};
  test_util::write_file(h.root() / "empty.jsonl", "");
  test_util::write_file(h.root() / "replay.json", m.dump());
  fs::path out = h.root() / "out";
  auto r = run_cli({"eval", "--manifest", (h.root() / "replay.json").string(), "--out",
                    out.string()});
  EXPECT_EQ(r.exit_code, 1) << r.err;
  auto records = read_telemetry(out / "telemetry.jsonl");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].stage_reached, Stage::kInfraError);
}

TEST(Cli, CorpusScanWritesLoadableManifest) {
  test_util::TempDir dir;
  fs::copy(test_util::fixture_path("toy"), dir.path() / "toy", fs::copy_options::recursive);
  fs::path out = dir.path() / "manifests/toy.json";
  auto r = run_cli({"corpus-scan", "--root", (dir.path() / "toy").string(), "--out",
                    out.string(), "--build-command", "python3 -B tools/build.py {test_class}",
                    "--test-command", "python3 -B tools/run.py {test_name}",
                    "--coverage-artifact", "out/{test_name}.info"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  ProjectManifest m = load_manifest(out);
  EXPECT_EQ(fs::canonical(m.root), fs::canonical(dir.path() / "toy"));
  ASSERT_EQ(m.targets.size(), 1u);
  EXPECT_EQ(m.targets[0].id, "tests");
  EXPECT_EQ(m.targets[0].test_class_paths.size(), 1u);
}

TEST(CApi, RenderPromptMatchesLibrary) {
  char* text = nullptr;
  ASSERT_EQ(tg_render_prompt("extend_test", "class ATest {}", nullptr, &text), TG_OK);
  EXPECT_EQ(std::string(text),
            render(*find_builtin_template("extend_test"), "class ATest {}", std::nullopt));
  tg_string_free(text);

  EXPECT_EQ(tg_render_prompt("extend_coverage", "class ATest {}", nullptr, &text),
            TG_ERR_MISSING_CLASS_UNDER_TEST);
  EXPECT_EQ(tg_render_prompt("sonnet", "class ATest {}", nullptr, &text), TG_ERR_USAGE);
  EXPECT_NE(std::string(tg_last_error()).find("sonnet"), std::string::npos);
}

TEST(CApi, StatusCodesAndNullArguments) {
  tg_session* s = nullptr;
  EXPECT_EQ(tg_session_open(nullptr, &s), TG_ERR_USAGE);
  ASSERT_EQ(tg_session_open("/no/such/manifest.json", &s), TG_OK);
  EXPECT_EQ(tg_session_set_jobs(s, 0), TG_ERR_USAGE);
  EXPECT_EQ(tg_session_set_temperature(s, -1), TG_ERR_USAGE);
  tg_run_summary summary{};
  EXPECT_EQ(tg_session_run(s, &summary), TG_ERR_MISSING_FILE);
  EXPECT_NE(std::string(tg_last_error()).find("/no/such/manifest.json"), std::string::npos);
  tg_session_close(s);

  char* text = nullptr;
  EXPECT_EQ(tg_report("/no/such/t.jsonl", nullptr, 0, nullptr, &text), TG_ERR_MISSING_FILE);
  EXPECT_EQ(tg_report("/no/such/t.jsonl", nullptr, 0, "galaxy", &text), TG_ERR_USAGE);
}

TEST(CApi, SessionRunSummary) {
  Harness h(mock_gain(), stub_any({gaining_response(), gaining_response()}));
  tg_session* s = nullptr;
  ASSERT_EQ(tg_session_open((h.root() / "manifest.json").c_str(), &s), TG_OK);
  ASSERT_EQ(tg_session_set_out_dir(s, (h.root() / "out").c_str()), TG_OK);
  ASSERT_EQ(tg_session_add_prompt(s, "extend_test"), TG_OK);
  ASSERT_EQ(tg_session_add_prompt(s, "corner_cases"), TG_OK);
  tg_run_summary summary{};
  ASSERT_EQ(tg_session_run(s, &summary), TG_OK) << tg_last_error();
  // Deployment: the first acceptance raises the baseline, so the repeat is a
  // duplicate of an accepted body.
  EXPECT_EQ(summary.configurations, 2u);
  EXPECT_EQ(summary.candidates, 2u);
  EXPECT_EQ(summary.accepted, 1u);
  EXPECT_EQ(summary.diffs, 1u);
  EXPECT_EQ(summary.infra_errors, 0u);
  char* report = nullptr;
  ASSERT_EQ(tg_session_report(s, &report), TG_OK);
  EXPECT_NE(std::string(report).find("accepted: 1"), std::string::npos);
  tg_string_free(report);
  tg_session_close(s);
}

}  // namespace
}  // namespace testgen
