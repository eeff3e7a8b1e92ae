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

// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "cli_harness.h"
#include "generators.h"
#include "oracles.h"
#include "pipeline_harness.h"
#include "record_fixtures.h"
#include "testgen/coverage.h"
#include "testgen/lcov.h"
#include "testgen/promptkit.h"
#include "testgen/telemetry.h"

namespace testgen {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using test_util::ensemble_stub;
using test_util::extended_class;
using test_util::fenced;
using test_util::Harness;
using test_util::kFooTestClass;
using test_util::marked;
using test_util::mock_with_lines;
using test_util::read_file;
using test_util::run_cli;
using test_util::stub_any;
using test_util::TempDir;
using test_util::test_fn;
using test_util::tmpl;
using test_util::write_file;

class Outcome {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  template <typename A, typename B>
  void expect_eq(const A& a, const B& b, const std::string& what) {
    if (!(a == b)) {
      std::ostringstream ss;
      ss << what << ": got " << a << ", want " << b;
      failures_.push_back(ss.str());
    }
  }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
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

std::vector<CandidateTest> one_trial(Harness& h, RunMode mode) {
  PipelineState state;
  Pipeline p = h.pipeline();
  p.prepare_target(h.target(), state);
  return p.run_trial(h.target(), h.test_class(), tmpl("extend_coverage"),
                     Harness::config(), mode, state);
}

// --- 1 ----------------------------------------------------------------------

// A corpus of `classes` test classes in one target. Class i's scripted
// response holds a test that fails to build plus, depending on i, a test
// that gains coverage (i < improving), passes without gain (i < non_flaky)
// or passes four of five runs (i < building).
fs::path write_funnel_corpus(const fs::path& dir, int classes, int building, int non_flaky,
                             int improving) {
  nlohmann::json stub_rules = nlohmann::json::array();
  nlohmann::json mock_rules = nlohmann::json::array();
  mock_rules.push_back({{"body_contains", "buildfail"}, {"build", "fail"}});
  mock_rules.push_back({{"body_contains", "wobble"},
                        {"runs", {"pass", "pass", "pass", "pass", "fail"}}});
  nlohmann::json test_classes = nlohmann::json::array();
  nlohmann::json cut = nlohmann::json::object();
  write_file(dir / "src/Lib.kt", "class Lib\n");
  for (int i = 0; i < classes; ++i) {
    std::string n = std::to_string(i);
    std::string cls = "package corpus\n\nclass K" + n + "Test {\n" +
                      test_fn("existing" + n, "assertEquals(" + n + ", Lib().k" + n + "())") +
                      "}\n";
    std::string rel = "tests/K" + n + "Test.kt";
    write_file(dir / rel, cls);
    test_classes.push_back(rel);
    cut[rel] = "src/Lib.kt";

    std::vector<std::string> fns = {
        test_fn("broken" + n, "assertEquals(0, Lib().buildfail" + n + "())")};
    if (i < improving) {
      fns.push_back(test_fn("gains" + n, "assertEquals(" + n + ", Lib().up" + n + "())"));
      mock_rules.push_back(
          {{"body_contains", "up" + n + "()"}, {"coverage", {{"src/Lib.kt", {1, 100 + i}}}}});
    } else if (i < non_flaky) {
      fns.push_back(test_fn("steady" + n, "assertEquals(" + n + ", Lib().same" + n + "())"));
    } else if (i < building) {
      fns.push_back(test_fn("wobbly" + n, "assertEquals(" + n + ", Lib().wobble" + n + "())"));
    }
    stub_rules.push_back({{"match", "contains"},
                          {"prompt", "class K" + n + "Test {"},
                          {"responses", {fenced(extended_class(cls, fns))}}});
  }
  write_file(dir / "stub.json", nlohmann::json{{"rules", stub_rules}}.dump());
  nlohmann::json manifest = {
      {"root", "."},
      {"dialect", nlohmann::json::object()},
      {"backend",
       {{"kind", "mock"},
        {"mock",
         {{"default",
           {{"build", "ok"}, {"runs", {"pass"}}, {"coverage", {{"src/Lib.kt", {1}}}}}},
          {"rules", mock_rules}}}}},
      {"llm", {{"provider", "stub"}, {"stub_script", "stub.json"}}},
      {"targets",
       {{{"id", "corpus"},
         {"test_classes", test_classes},
         {"class_under_test", cut},
         {"build_command", "build"},
         {"test_command", "run {test_name}"},
         {"coverage_artifact", "cov.info"}}}}};
  write_file(dir / "manifest.json", manifest.dump(2));
  return dir / "manifest.json";
}

void funnel_case(Outcome& o, int classes, int building, int non_flaky, int improving,
                 const char* built_rate, const char* non_flaky_rate, const char* improves_rate) {
  TempDir dir;
  auto start = Clock::now();
  fs::path manifest = write_funnel_corpus(dir.path(), classes, building, non_flaky, improving);
  auto r = run_cli({"eval", "--manifest", manifest.string(), "--out",
                    (dir.path() / "out").string()});
  double elapsed = seconds_since(start);
  std::string tag = std::to_string(classes) + " classes";
  o.expect_eq(r.exit_code, 0, tag + ": exit code");
  o.expect(elapsed < 10.0, tag + ": runtime " + std::to_string(elapsed) + " s");
  auto records = read_telemetry(dir.path() / "out/telemetry.jsonl");
  FunnelStats f = funnel_stats(records, FunnelLevel::kTestClass);
  o.expect_eq(f.total, static_cast<std::size_t>(classes), tag + ": classes");
  o.expect_eq(format_rate(f.stage("built").count, f.total), std::string(built_rate),
              tag + ": built");
  o.expect_eq(format_rate(f.stage("non_flaky").count, f.total), std::string(non_flaky_rate),
              tag + ": reliably passing");
  o.expect_eq(format_rate(f.stage("improves").count, f.total), std::string(improves_rate),
              tag + ": improving");
  // The same numbers appear in the eval report.
  std::string report = read_file(dir.path() / "out/report.txt");
  std::regex row("built +" + std::to_string(building) + " +" + built_rate);
  o.expect(std::regex_search(report, row), tag + ": report row for built");
}

void criterion_1(Outcome& o) {
  funnel_case(o, 20, 15, 11, 5, "0.75", "0.55", "0.25");
  funnel_case(o, 100, 75, 57, 25, "0.75", "0.57", "0.25");
}

// --- 2-5 ----------------------------------------------------------------------

void criterion_2(Outcome& o) {
  std::string wobbly = test_fn("wobbly", "assertEquals(4, Foo().mark4())");
  std::string steady = test_fn("steady", "assertEquals(5, Foo().mark5())");
  nlohmann::json mock = mock_with_lines({4, 5});
  mock["rules"].insert(mock["rules"].begin(),
                       nlohmann::json{{"test_name", "wobbly"},
                                      {"runs", {"pass", "pass", "pass", "pass", "fail"}}});
  Harness h(mock, stub_any({fenced(extended_class(kFooTestClass, {wobbly, steady}))}));
  auto out = one_trial(h, RunMode::kEvaluation);
  if (out.size() != 2) return o.expect(false, "expected two candidates");
  auto calls = h.backend().calls();
  auto count = [&](const std::string& entry) {
    return std::count(calls.begin(), calls.end(), entry);
  };
  o.expect_eq(std::string(stage_name(out[0].verdict.stage)), std::string("flaky"), "4 of 5");
  o.expect_eq(count("run:" + out[0].candidate_id + ":wobbly"), 5, "runs of the 4/5 test");
  o.expect_eq(count("coverage:" + out[0].candidate_id + ":wobbly"), 0, "coverage of 4/5 test");
  o.expect_eq(count("run:" + out[1].candidate_id + ":steady"), 5, "runs of the 5/5 test");
  o.expect_eq(count("coverage:" + out[1].candidate_id + ":steady"), 1, "5/5 reaches coverage");
  o.expect(out[1].delta.has_value(), "5/5 test has a coverage delta");
}

void criterion_3(Outcome& o) {
  std::string copy = test_fn("existingAgain", "assertEquals(1, Foo().one())");
  Harness h(mock_with_lines({}), stub_any({fenced(extended_class(kFooTestClass, {copy}))}));
  auto out = one_trial(h, RunMode::kDeployment);
  if (out.size() != 1) return o.expect(false, "expected one candidate");
  o.expect_eq(std::string(stage_name(out[0].verdict.stage)), std::string("duplicate"), "stage");
  o.expect_eq(h.backend().calls_for(out[0].candidate_id), 0u, "backend calls");
}

void criterion_4(Outcome& o) {
  std::string same = test_fn("sameLines", "assertEquals(1, Foo().one() + 0)");
  std::string plus = test_fn("oneMore", "assertEquals(3, Foo().mark3())");
  Harness h(mock_with_lines({3}), stub_any({fenced(extended_class(kFooTestClass, {same, plus}))}));
  auto out = one_trial(h, RunMode::kEvaluation);
  if (out.size() != 2) return o.expect(false, "expected two candidates");
  o.expect_eq(std::string(stage_name(out[0].verdict.stage)), std::string("no_coverage_gain"),
              "subset of baseline");
  o.expect_eq(std::string(stage_name(out[1].verdict.stage)), std::string("accepted"),
              "baseline + 1 line");
  o.expect(out[1].delta && out[1].delta->total_new_lines == 1, "total_new_lines == 1");
}

void criterion_5(Outcome& o) {
  std::string a = test_fn("first", "assertEquals(8, Foo().mark8())");
  std::string b = test_fn("second", "assertEquals(8, Foo().mark8() + 0)");
  auto accepted = [&](RunMode mode) {
    Harness h(mock_with_lines({8}), stub_any({fenced(extended_class(kFooTestClass, {a, b}))}));
    auto out = one_trial(h, mode);
    return std::count_if(out.begin(), out.end(), [](const auto& c) { return c.accepted(); });
  };
  o.expect_eq(accepted(RunMode::kEvaluation), 2, "evaluation accepts both");
  o.expect_eq(accepted(RunMode::kDeployment), 1, "deployment accepts one");
}

// --- 6-9 ----------------------------------------------------------------------

void criterion_6(Outcome& o) {
  TempDir dir;
  std::vector<TrialRecord> records;
  fixtures::append_rows(records, 490, 8996, 0.0, "LLM2", "platform-a");
  fixtures::append_rows(records, 831, 23535, 0.0, "LLM2", "platform-b");
  std::vector<TrialRecord> sweep;
  fixtures::append_rows(sweep, 1215, 30483, 0.0);
  fixtures::append_rows(sweep, 16, 334, 0.4);
  {
    TelemetryWriter w(dir.path() / "platforms.jsonl");
    for (const auto& r : records) w.append(r);
    TelemetryWriter t(dir.path() / "temps.jsonl");
    for (const auto& r : sweep) t.append(r);
  }
  auto platforms = success_table(read_telemetry(dir.path() / "platforms.jsonl"), "platform_tag");
  auto temps = success_table(read_telemetry(dir.path() / "temps.jsonl"), "temperature");
  if (platforms.rows.size() != 2 || temps.rows.size() != 2) {
    return o.expect(false, "unexpected row count");
  }
  o.expect_eq(platforms.rows[0].rate, std::string("0.05"), "490/8,996");
  o.expect_eq(platforms.rows[1].rate, std::string("0.04"), "831/23,535");
  o.expect_eq(temps.rows[1].group[0] + " " + temps.rows[1].rate, std::string("0.0 0.04"),
              "1,215/30,483 at t=0.0");
}

void criterion_7(Outcome& o) {
  for (const PromptTemplate& t : builtin_templates()) {
    std::string golden = test_util::read_fixture("golden/prompts/" + t.name + ".txt");
    o.expect(render(t, "<<EXISTING_TEST_CLASS>>", std::string("<<CLASS_UNDER_TEST>>")) == golden,
             t.name + " differs from its golden file");
  }
  o.expect_eq(builtin_templates().size(), 4u, "template count");
}

void criterion_8(Outcome& o) {
  auto start = Clock::now();
  std::mt19937 rng(8);
  int dialect_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    generators::GeneratedClass g = generators::random_test_class(rng);
    std::string why;
    try {
      why = generators::check_round_trip(g, rng);
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (!why.empty() && dialect_failures++ == 0) o.expect(false, "dialect fixture: " + why);
  }
  o.expect_eq(dialect_failures, 0, "dialect failures");

  int coverage_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    CoverageMap cand = oracles::random_map(rng, 6, 30);
    CoverageMap base = oracles::random_map(rng, 6, 30);
    CoverageDelta d = coverage_delta(cand, base, std::nullopt);
    auto expected = oracles::difference_pairs(cand, base);
    auto kept = oracles::intersection_pairs(cand, base);
    kept.insert(expected.begin(), expected.end());
    CoverageMap bigger = coverage_union(base, oracles::random_map(rng, 6, 30));
    auto shrunk = oracles::delta_pairs(coverage_delta(cand, bigger, std::nullopt));
    std::vector<CoverageMap> both = {cand, base};
    bool ok = oracles::delta_pairs(d) == expected && d.total_new_lines == expected.size() &&
              kept == oracles::to_pairs(cand) &&
              std::includes(expected.begin(), expected.end(), shrunk.begin(), shrunk.end()) &&
              oracles::to_pairs(coverage_union(cand, base)) == oracles::union_pairs(both) &&
              coverage_union(cand, base).total_lines() >= base.total_lines();
    coverage_failures += !ok;
  }
  o.expect_eq(coverage_failures, 0, "coverage failures");
  double elapsed = seconds_since(start);
  o.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
}

void criterion_9(Outcome& o) {
  Harness probe(mock_with_lines({}), stub_any({}));
  int mismatches = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937 rng(seed);
    std::vector<std::string> models = {"LLM1", "LLM2", "LLM3"};
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> tests;
    for (const auto& m : models) {
      for (const auto& t : builtin_templates()) {
        for (int l = 3; l < 15; ++l) {
          if (rng() % 3 == 0) tests[{m, t.name}].push_back(marked(l, "t" + std::to_string(l)));
        }
      }
    }
    nlohmann::json mock = mock_with_lines({3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14});
    int broken = 3 + static_cast<int>(rng() % 12);
    mock["rules"].insert(mock["rules"].begin(),
                         nlohmann::json{{"body_contains", "mark" + std::to_string(broken) + "()"},
                                        {"build", "fail"}});
    Harness h(mock, ensemble_stub(probe, tests));
    PipelineState state;
    Pipeline p = h.pipeline();
    p.prepare_target(h.target(), state);
    std::vector<PromptTemplate> templates = builtin_templates();
    std::vector<LlmConfig> configs;
    for (const auto& m : models) configs.push_back(Harness::config(m));
    EnsembleResult r = p.ensemble_run(h.target(), h.test_class(), templates, configs,
                                      RunMode::kEvaluation, state);
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> accepted;
    for (const CandidateTest& c : r.candidates) {
      auto& bodies = accepted[{c.origin.model_id, c.origin.prompt_name}];
      if (c.accepted()) bodies.push_back(c.test.normalized_body);
    }
    auto expected = oracles::unique_counts(accepted);
    for (const Contribution& row : r.contributions) {
      mismatches += row.unique_count != expected.at({row.model_id, row.prompt_name});
    }
  }
  o.expect_eq(mismatches, 0, "mismatches over 100 seeds");
}

// --- 10 -----------------------------------------------------------------------

void criterion_10(Outcome& o) {
  std::vector<std::string> fns;
  for (int l = 3; l < 9; ++l) fns.push_back(marked(l, "t" + std::to_string(l)));
  fns.push_back(test_fn("noAssert", "Foo().mark9()"));
  std::vector<std::string> responses = {
      fenced(extended_class(kFooTestClass, {fns[0], fns[1], fns[2]})),
      fenced(extended_class(kFooTestClass, {fns[2], fns[3], fns[6]})),
      fenced(extended_class(kFooTestClass, {fns[4], fns[5]}))};
  Harness h(mock_with_lines({3, 4, 5, 6, 7, 8, 9}), stub_any(responses));
  nlohmann::json m = nlohmann::json::parse(read_file(h.root() / "manifest.json"));
  m["llm"]["samples_per_prompt"] = 3;
  m["llm"]["record_cassette"] = "cassette.jsonl";
  write_file(h.root() / "record.json", m.dump());
  m["llm"] = {{"provider", "replay"}, {"cassette", "cassette.jsonl"}, {"samples_per_prompt", 3}};
  write_file(h.root() / "replay.json", m.dump());

  std::vector<std::string> flags = {"--prompt", "all", "--llm", "LLM1", "--llm", "LLM2",
                                    "--temp-sweep", "--jobs", "4"};
  auto run = [&](const std::string& manifest, const std::string& out) {
    std::vector<std::string> args = {"extend", "--manifest", (h.root() / manifest).string(),
                                     "--out", (h.root() / out).string()};
    args.insert(args.end(), flags.begin(), flags.end());
    return run_cli(args);
  };
  auto rec = run("record.json", "recorded");
  auto a = run("replay.json", "a");
  auto b = run("replay.json", "b");
  o.expect_eq(rec.exit_code, 0, "recording run exit");
  o.expect_eq(a.exit_code, 0, "first replay exit");
  o.expect_eq(b.exit_code, 0, "second replay exit");
  if (!o.failures().empty()) return;

  std::string ta = without_timestamps(h.root() / "a/telemetry.jsonl");
  o.expect(!ta.empty(), "telemetry written");
  o.expect(ta == without_timestamps(h.root() / "b/telemetry.jsonl"), "telemetry differs");
  o.expect(ta == without_timestamps(h.root() / "recorded/telemetry.jsonl"),
           "replay differs from the recorded run");
  std::map<std::string, std::string> da, db;
  for (auto* pair : {&da, &db}) {
    fs::path dir = h.root() / (pair == &da ? "a/diffs" : "b/diffs");
    for (const auto& e : fs::directory_iterator(dir)) {
      (*pair)[e.path().filename().string()] = read_file(e.path());
    }
  }
  o.expect(!da.empty(), "diffs written");
  o.expect(da == db, "diffs differ");
  for (const char* f : {"report.txt", "sankey.txt", "state.json", "hints.txt"}) {
    o.expect(read_file(h.root() / "a" / f) == read_file(h.root() / "b" / f),
             std::string(f) + " differs");
  }
}

// --- 11 -----------------------------------------------------------------------

using LineKeys = std::set<std::pair<std::string, int>>;

// DA records of an LCOV file, keyed by the source file's base name.
LineKeys read_da(const fs::path& path) {
  LineKeys out;
  std::istringstream in(read_file(path));
  std::string line, file;
  while (std::getline(in, line)) {
    if (line.rfind("SF:", 0) == 0) file = fs::path(line.substr(3)).filename().string();
    if (line.rfind("DA:", 0) == 0) {
      int n = std::stoi(line.substr(3));
      int hits = std::stoi(line.substr(line.find(',') + 1));
      if (hits > 0) out.emplace(file, n);
    }
  }
  return out;
}

LineKeys run_toy_test(const fs::path& dir, const std::string& name) {
  fs::path info = dir / ("oracle-" + name + ".info");
  std::string cmd = "cd " + test_util::shell_quote(dir.string()) +
                    " && TESTGEN_COVERAGE_FILE=" + test_util::shell_quote(info.string()) +
                    " python3 -B tools/run.py " + test_util::shell_quote(name) + " >/dev/null";
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("oracle run failed: " + name);
  return read_da(info);
}

void criterion_11(Outcome& o) {
  TempDir dir;
  fs::path work = dir.path() / "work";
  fs::path oracle = dir.path() / "oracle";
  fs::copy(test_util::fixture_path("toy"), work, fs::copy_options::recursive);
  fs::copy(test_util::fixture_path("toy"), oracle, fs::copy_options::recursive);

  auto start = Clock::now();
  auto r = run_cli({"extend", "--manifest", (work / "testgen.json").string(), "--out",
                    (work / "out").string()});
  double elapsed = seconds_since(start);
  o.expect_eq(r.exit_code, 0, "extend exit");
  o.expect(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s");
  if (r.exit_code != 0) return;

  // Rebuild the toy class with every added function, taken from the '+'
  // lines of the diffs, and measure each test directly.
  const std::string original = read_file(oracle / "tests/CalcTest.kt");
  std::vector<std::string> accepted_names;
  std::map<std::string, std::string> diff_text;
  std::string added;
  for (const TrialRecord& rec : read_telemetry(work / "out/telemetry.jsonl")) {
    if (rec.stage_reached != Stage::kAccepted) continue;
    fs::path diff = work / "out/diffs" / (rec.candidate_id + ".diff");
    if (!fs::exists(diff)) continue;
    std::string text = read_file(diff);
    diff_text[rec.test_name] = text;
    accepted_names.push_back(rec.test_name);
    std::istringstream in(text.substr(text.find("@@")));
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("+", 0) == 0) added += line.substr(1) + "\n";
    }
  }
  o.expect(!accepted_names.empty(), "at least one diff");
  std::string rebuilt = original;
  rebuilt.insert(rebuilt.rfind('}'), added);
  write_file(oracle / "tests/CalcTest.kt", rebuilt);
  std::string build = "cd " + test_util::shell_quote(oracle.string()) +
                      " && python3 -B tools/build.py tests/CalcTest.kt >/dev/null";
  if (std::system(build.c_str()) != 0) return o.expect(false, "oracle build failed");

  LineKeys baseline;
  for (const char* name : {"clampInside", "divides", "firstItem"}) {
    LineKeys k = run_toy_test(oracle, name);
    baseline.insert(k.begin(), k.end());
  }
  for (const std::string& name : accepted_names) {
    LineKeys cand = run_toy_test(oracle, name);
    std::map<std::string, int> per_file;
    int total = 0;
    for (const auto& key : cand) {
      if (baseline.count(key)) continue;
      ++per_file[key.first];
      ++total;
    }
    const std::string& text = diff_text[name];
    auto lines = [](int n) { return std::to_string(n) + (n == 1 ? " line" : " lines"); };
    o.expect(total > 0, name + ": oracle finds no gain");
    o.expect(text.find("Coverage gain: " + lines(total) + " ") != std::string::npos,
             name + ": total differs from oracle " + std::to_string(total));
    for (const auto& [file, n] : per_file) {
      o.expect(text.find(file + ": +" + lines(n) + " (") != std::string::npos,
               name + ": " + file + " count differs from oracle " + std::to_string(n));
    }
    // Deployment accumulates: later diffs are measured against earlier ones.
    baseline.insert(cand.begin(), cand.end());
  }
}

}  // namespace
}  // namespace testgen

int main() {
  using Criterion = std::pair<const char*, std::function<void(testgen::Outcome&)>>;
  const std::vector<Criterion> criteria = {
      {"class-level funnel from a scripted corpus", testgen::criterion_1},
      {"flakiness requires five of five passes", testgen::criterion_2},
      {"byte-identical body is a duplicate with no backend calls", testgen::criterion_3},
      {"coverage gate: subset rejected, one new line accepted", testgen::criterion_4},
      {"evaluation accepts both, deployment one", testgen::criterion_5},
      {"success-rate arithmetic", testgen::criterion_6},
      {"prompt templates match golden files", testgen::criterion_7},
      {"round-trip and coverage algebra properties", testgen::criterion_8},
      {"ensemble unique contributions match pairwise oracle", testgen::criterion_9},
      {"replay determinism of telemetry and diffs", testgen::criterion_10},
      {"end-to-end command backend on the toy project", testgen::criterion_11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    testgen::Outcome outcome;
    try {
      criteria[i].second(outcome);
    } catch (const std::exception& e) {
      outcome.expect(false, std::string("exception: ") + e.what());
    }
    bool ok = outcome.failures().empty();
    failed += !ok;
    std::printf("%s criterion %zu: %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first);
    for (const std::string& f : outcome.failures()) std::printf("    %s\n", f.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
