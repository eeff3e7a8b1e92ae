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

#include "testgen/exec_backend.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "subprocess.h"
#include "testgen/error.h"
#include "testgen/lcov.h"

namespace testgen {

namespace fs = std::filesystem;

namespace {

std::string replace_all(std::string text, std::string_view from,
                        const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += safe ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

bool is_within(const fs::path& path, const fs::path& dir) {
  auto rel = path.lexically_relative(dir);
  return !rel.empty() && *rel.begin() != "..";
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void copy_tree(const fs::path& from, const fs::path& to, const fs::path& skip) {
  fs::create_directories(to);
  for (auto it = fs::recursive_directory_iterator(from);
       it != fs::recursive_directory_iterator(); ++it) {
    const fs::path& src = it->path();
    if (!skip.empty() && (src == skip || is_within(src, skip))) {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    fs::path dst = to / src.lexically_relative(from);
    if (it->is_symlink()) {
      fs::copy_symlink(src, dst);
    } else if (it->is_directory()) {
      fs::create_directories(dst);
    } else if (it->is_regular_file()) {
      fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
    }
  }
}

ExecStatus parse_build_status(const std::string& s) {
  if (s == "ok") return ExecStatus::kOk;
  if (s == "fail") return ExecStatus::kBuildFailed;
  if (s == "timeout") return ExecStatus::kTimeout;
  throw Error(ErrorCode::kSchemaError, "mock build status must be ok, fail or timeout: " + s);
}

ExecStatus parse_run_status(const std::string& s) {
  if (s == "pass") return ExecStatus::kOk;
  if (s == "fail") return ExecStatus::kTestFailed;
  if (s == "timeout") return ExecStatus::kTimeout;
  throw Error(ErrorCode::kSchemaError, "mock run status must be pass, fail or timeout: " + s);
}

MockRule rule_from_json(const nlohmann::json& j, const MockRule& base) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "mock rule must be an object");
  MockRule r = base;
  r.test_name.reset();
  r.body_contains.reset();
  if (j.contains("test_name")) r.test_name = j.at("test_name").get<std::string>();
  if (j.contains("body_contains")) r.body_contains = j.at("body_contains").get<std::string>();
  if (j.contains("build")) r.build = j.at("build").get<std::string>();
  if (j.contains("runs")) r.runs = j.at("runs").get<std::vector<std::string>>();
  if (j.contains("coverage")) r.coverage = coverage_map_from_json(j.at("coverage"));
  parse_build_status(r.build);
  if (r.runs.empty()) throw Error(ErrorCode::kSchemaError, "mock runs must not be empty");
  for (const std::string& s : r.runs) parse_run_status(s);
  return r;
}

}  // namespace

std::string_view exec_status_name(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk: return "ok";
    case ExecStatus::kBuildFailed: return "build_failed";
    case ExecStatus::kTestFailed: return "test_failed";
    case ExecStatus::kTimeout: return "timeout";
  }
  return "ok";
}

RunVerdict classify_runs(const RunSeries& series, int runs) {
  for (std::size_t i = 0; i < series.outcomes.size(); ++i) {
    if (!series.outcomes[i].ok())
      return i == 0 ? RunVerdict::kFailedFirstRun : RunVerdict::kFlaky;
  }
  if (series.outcomes.empty()) return RunVerdict::kFailedFirstRun;
  if (static_cast<int>(series.outcomes.size()) < runs) return RunVerdict::kFlaky;
  return RunVerdict::kNonFlaky;
}

// --- command -----------------------------------------------------------------

CommandBackend::CommandBackend(BackendConfig config) : config_(std::move(config)) {
  if (config_.flaky_runs < 1) {
    throw Error(ErrorCode::kSchemaError, "flaky_runs must be >= 1");
  }
  if (!config_.scratch_root.empty()) {
    scratch_root_ = config_.scratch_root;
    fs::create_directories(scratch_root_);
  } else {
    std::string tmpl = (fs::temp_directory_path() / "testgen-scratch-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
      throw Error(ErrorCode::kInfraError, "cannot create scratch directory");
    }
    scratch_root_ = tmpl;
    owns_scratch_root_ = true;
  }
}

CommandBackend::~CommandBackend() {
  std::error_code ec;
  if (owns_scratch_root_) fs::remove_all(scratch_root_, ec);
}

fs::path CommandBackend::scratch_dir(const std::string& candidate_id) const {
  return scratch_root_ / sanitize_id(candidate_id);
}

std::string CommandBackend::expand(const std::string& command,
                                   const CandidateSource& candidate,
                                   const TestCase* test) const {
  std::string out = command;
  if (test) out = replace_all(out, "{test_name}", test->name);
  out = replace_all(out, "{test_class}",
                    candidate.test_class.lexically_relative(config_.workdir).string());
  out = replace_all(out, "{class_name}", candidate.class_name);
  out = replace_all(out, "{workdir}", scratch_dir(candidate.candidate_id).string());
  return out;
}

ExecOutcome CommandBackend::build(const CandidateSource& candidate,
                                  const BuildTarget& target) {
  std::unique_lock<std::mutex> lock(serial_, std::defer_lock);
  if (!config_.parallel_safe) lock.lock();
  fs::path workdir = fs::absolute(config_.workdir).lexically_normal();
  if (!is_within(candidate.test_class, workdir)) {
    throw Error(ErrorCode::kInfraError, candidate.test_class.string() +
                                            " is outside the workdir " +
                                            workdir.string());
  }
  fs::path scratch = scratch_dir(candidate.candidate_id);
  std::error_code ec;
  fs::remove_all(scratch, ec);
  try {
    copy_tree(workdir, scratch, fs::absolute(scratch_root_).lexically_normal());
    fs::path installed = scratch / candidate.test_class.lexically_relative(workdir);
    fs::create_directories(installed.parent_path());
    std::ofstream out(installed, std::ios::binary | std::ios::trunc);
    out << candidate.class_text;
    if (!out) throw Error(ErrorCode::kInfraError, "cannot write " + installed.string());
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::kInfraError, std::string("scratch setup failed: ") + e.what());
  }

  internal::ProcessOptions options;
  options.cwd = scratch;
  options.timeout = std::chrono::milliseconds(
      static_cast<long long>(config_.timeout_s * 1000));
  internal::ProcessResult r =
      internal::run_shell(expand(target.build_command, candidate, nullptr), options);
  ExecOutcome outcome;
  outcome.stdout_excerpt = std::move(r.out);
  outcome.stderr_excerpt = std::move(r.err);
  if (r.timed_out) {
    outcome.status = ExecStatus::kTimeout;
  } else if (r.exit_code != 0) {
    outcome.status = ExecStatus::kBuildFailed;
  }
  return outcome;
}

ExecOutcome CommandBackend::run_once(const CandidateSource& candidate,
                                     const TestCase& test,
                                     const BuildTarget& target) {
  internal::ProcessOptions options;
  options.cwd = scratch_dir(candidate.candidate_id);
  options.timeout = std::chrono::milliseconds(
      static_cast<long long>(config_.timeout_s * 1000));
  internal::ProcessResult r =
      internal::run_shell(expand(target.test_command, candidate, &test), options);
  ExecOutcome outcome;
  outcome.stdout_excerpt = std::move(r.out);
  outcome.stderr_excerpt = std::move(r.err);
  if (r.timed_out) {
    outcome.status = ExecStatus::kTimeout;
  } else if (r.exit_code != 0) {
    outcome.status = ExecStatus::kTestFailed;
  }
  return outcome;
}

RunSeries CommandBackend::run_repeated(const CandidateSource& candidate,
                                       const TestCase& test,
                                       const BuildTarget& target, int runs) {
  std::unique_lock<std::mutex> lock(serial_, std::defer_lock);
  if (!config_.parallel_safe) lock.lock();
  RunSeries series;
  for (int i = 0; i < runs; ++i) {
    series.outcomes.push_back(run_once(candidate, test, target));
    if (!series.outcomes.back().ok()) {
      series.skipped = runs - i - 1;
      break;
    }
  }
  return series;
}

CoverageMap CommandBackend::measure_coverage(const CandidateSource& candidate,
                                             const TestCase& test,
                                             const BuildTarget& target) {
  std::unique_lock<std::mutex> lock(serial_, std::defer_lock);
  if (!config_.parallel_safe) lock.lock();
  fs::path scratch = fs::absolute(scratch_dir(candidate.candidate_id)).lexically_normal();
  fs::path artifact = scratch / expand(target.coverage_artifact, candidate, &test);
  std::error_code ec;
  fs::remove(artifact, ec);

  internal::ProcessOptions options;
  options.cwd = scratch;
  options.timeout = std::chrono::milliseconds(
      static_cast<long long>(config_.timeout_s * 1000));
  options.env = {{"TESTGEN_COVERAGE", "1"},
                 {"TESTGEN_COVERAGE_FILE", artifact.string()}};
  internal::ProcessResult r =
      internal::run_shell(expand(target.test_command, candidate, &test), options);
  if (r.timed_out || r.exit_code != 0) {
    throw Error(ErrorCode::kInfraError,
                "instrumented run of " + test.name + " failed: " + r.err);
  }
  if (!fs::is_regular_file(artifact)) {
    throw Error(ErrorCode::kArtifactMissing,
                "coverage artifact not produced: " + artifact.string());
  }
  CoverageMap raw = parse_lcov(read_text(artifact));
  fs::remove(artifact, ec);

  fs::path workdir = fs::absolute(config_.workdir).lexically_normal();
  CoverageMap out;
  for (const auto& [file, lines] : raw.entries) {
    fs::path p = fs::path(file).lexically_normal();
    if (p.is_absolute() && is_within(p, scratch)) {
      p = p.lexically_relative(scratch);
    } else if (p.is_absolute() && is_within(p, workdir)) {
      p = p.lexically_relative(workdir);
    }
    out.add(p.generic_string(), lines);
  }
  return out;
}

void CommandBackend::release(const std::string& candidate_id) {
  std::error_code ec;
  fs::remove_all(scratch_dir(candidate_id), ec);
}

// --- mock ----------------------------------------------------------------------

MockBackend::MockBackend(MockRule fallback, std::vector<MockRule> rules)
    : fallback_(std::move(fallback)), rules_(std::move(rules)) {}

MockBackend::MockBackend(const nlohmann::json& script) {
  if (script.contains("default")) fallback_ = rule_from_json(script.at("default"), fallback_);
  if (script.contains("rules")) {
    for (const auto& r : script.at("rules")) rules_.push_back(rule_from_json(r, fallback_));
  }
}

const MockRule& MockBackend::rule_for(const TestCase& test) const {
  for (const MockRule& r : rules_) {
    if (r.test_name && *r.test_name != test.name) continue;
    if (r.body_contains && test.body_text.find(*r.body_contains) == std::string::npos)
      continue;
    return r;
  }
  return fallback_;
}

void MockBackend::log(std::string entry) {
  std::lock_guard<std::mutex> lock(mu_);
  calls_.push_back(std::move(entry));
}

std::vector<std::string> MockBackend::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

std::size_t MockBackend::calls_for(const std::string& candidate_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return std::count_if(calls_.begin(), calls_.end(), [&](const std::string& c) {
    auto first = c.find(':');
    auto rest = c.substr(first + 1);
    return rest == candidate_id || rest.rfind(candidate_id + ":", 0) == 0;
  });
}

ExecOutcome MockBackend::build(const CandidateSource& candidate, const BuildTarget&) {
  log("build:" + candidate.candidate_id);
  ExecOutcome outcome;
  if (candidate.added_test) {
    outcome.status = parse_build_status(rule_for(*candidate.added_test).build);
  }
  if (outcome.status == ExecStatus::kBuildFailed) {
    outcome.stderr_excerpt = "scripted build failure";
  }
  return outcome;
}

RunSeries MockBackend::run_repeated(const CandidateSource& candidate,
                                    const TestCase& test, const BuildTarget&,
                                    int runs) {
  const MockRule& rule = rule_for(test);
  RunSeries series;
  for (int i = 0; i < runs; ++i) {
    log("run:" + candidate.candidate_id + ":" + test.name);
    const std::string& s = rule.runs[std::min<std::size_t>(i, rule.runs.size() - 1)];
    ExecOutcome outcome;
    outcome.status = parse_run_status(s);
    series.outcomes.push_back(outcome);
    if (!outcome.ok()) {
      series.skipped = runs - i - 1;
      break;
    }
  }
  return series;
}

CoverageMap MockBackend::measure_coverage(const CandidateSource& candidate,
                                          const TestCase& test, const BuildTarget&) {
  log("coverage:" + candidate.candidate_id + ":" + test.name);
  return rule_for(test).coverage;
}

std::unique_ptr<ExecBackend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::kMock) {
    return std::make_unique<MockBackend>(
        config.mock.is_object() ? config.mock : nlohmann::json::object());
  }
  return std::make_unique<CommandBackend>(config);
}

}  // namespace testgen
