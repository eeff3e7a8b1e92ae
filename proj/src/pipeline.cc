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

#include "testgen/pipeline.h"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "testgen/error.h"
#include "testgen/hashing.h"

namespace testgen {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRepromptSuffix = ":reprompt";

std::string body_key(const TestCase& test) { return sha256_hex(test.normalized_body); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string base_prompt_name(const std::string& name) {
  auto pos = name.find(':');
  return pos == std::string::npos ? name : name.substr(0, pos);
}

std::string excerpt(const std::string& text, std::size_t limit = 400) {
  std::string out = text.size() <= limit ? text : text.substr(0, limit);
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

// Releases a candidate's scratch workspace on scope exit.
class ScratchLease {
 public:
  ScratchLease(ExecBackend& backend, std::string id)
      : backend_(backend), id_(std::move(id)) {}
  ~ScratchLease() { backend_.release(id_); }
  ScratchLease(const ScratchLease&) = delete;
  ScratchLease& operator=(const ScratchLease&) = delete;

 private:
  ExecBackend& backend_;
  std::string id_;
};

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kNoParse: return "no_parse";
    case Stage::kDuplicate: return "duplicate";
    case Stage::kBuildFailed: return "build_failed";
    case Stage::kFailedFirstRun: return "failed_first_run";
    case Stage::kFlaky: return "flaky";
    case Stage::kNoCoverageGain: return "no_coverage_gain";
    case Stage::kAccepted: return "accepted";
    case Stage::kInfraError: return "infra_error";
  }
  return "no_parse";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::kNoParse, Stage::kDuplicate, Stage::kBuildFailed,
                  Stage::kFailedFirstRun, Stage::kFlaky, Stage::kNoCoverageGain,
                  Stage::kAccepted, Stage::kInfraError}) {
    if (stage_name(s) == name) return s;
  }
  throw Error(ErrorCode::kSchemaError, "unknown stage '" + std::string(name) + "'");
}

std::string_view run_mode_name(RunMode mode) {
  return mode == RunMode::kEvaluation ? "evaluation" : "deployment";
}

RunMode parse_run_mode(std::string_view name) {
  if (name == "evaluation" || name == "eval") return RunMode::kEvaluation;
  if (name == "deployment" || name == "deploy") return RunMode::kDeployment;
  throw Error(ErrorCode::kUsage, "unknown mode '" + std::string(name) + "'");
}

HintFlags classify_hints(const TestCase& test) {
  HintFlags flags;
  flags.missing_assertion = !test.has_assertion;
  flags.todo_marker = test.has_todo;
  return flags;
}

// --- state ---------------------------------------------------------------------

bool TargetState::seen(const TestCase& test) const {
  return registry.count(body_key(test)) > 0;
}

void TargetState::remember(const TestCase& test) { registry.insert(body_key(test)); }

nlohmann::json PipelineState::to_json() const {
  nlohmann::json targets_json = nlohmann::json::object();
  for (const auto& [id, t] : targets) {
    targets_json[id] = {{"baseline_fingerprint", t.baseline_fingerprint},
                        {"original_baseline", testgen::to_json(t.original_baseline)},
                        {"working_baseline", testgen::to_json(t.working_baseline)},
                        {"registry", t.registry},
                        {"accepted_ids", t.accepted_ids}};
  }
  return {{"version", 1}, {"targets", targets_json}};
}

PipelineState PipelineState::from_json(const nlohmann::json& j) {
  PipelineState state;
  try {
    for (const auto& [id, t] : j.at("targets").items()) {
      TargetState ts;
      ts.baseline_fingerprint = t.at("baseline_fingerprint").get<std::string>();
      ts.original_baseline = coverage_map_from_json(t.at("original_baseline"));
      ts.working_baseline = coverage_map_from_json(t.at("working_baseline"));
      ts.registry = t.at("registry").get<std::set<std::string>>();
      ts.accepted_ids = t.at("accepted_ids").get<std::vector<std::string>>();
      state.targets[id] = std::move(ts);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::vector<SchemaIssue>{{"state", e.what()}});
  }
  return state;
}

PipelineState PipelineState::load(const fs::path& path) {
  if (!fs::exists(path)) return {};
  nlohmann::json j = nlohmann::json::parse(read_text(path), nullptr, false);
  if (j.is_discarded()) {
    throw SchemaError(std::vector<SchemaIssue>{{"state", "not valid JSON"}});
  }
  return from_json(j);
}

void PipelineState::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json().dump(1) << "\n";
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// --- re-prompt and contributions ---------------------------------------------

std::optional<std::string> detect_reprompt(const CandidateTest& candidate,
                                           const MethodSpan& method,
                                           std::string_view original_prompt) {
  if (!candidate.accepted() || !candidate.delta || method.lines.empty())
    return std::nullopt;
  LineSet covered;
  for (const auto& [file, lines] : candidate.delta->newly_covered) {
    if (!same_source_file(file, method.file)) continue;
    for (int l : lines) {
      if (method.lines.count(l)) covered.insert(l);
    }
  }
  if (covered.empty() || covered.size() == method.lines.size()) return std::nullopt;
  std::size_t missing = method.lines.size() - covered.size();
  std::string method_name = method.name.empty() ? "the method" : "method " + method.name;
  std::ostringstream out;
  out << original_prompt << "\n\nThe test case " << candidate.test.name << " covers "
      << covered.size() << " of the " << method.lines.size() << " lines of "
      << method_name << " in " << fs::path(method.file).filename().string() << "; "
      << missing << (missing == 1 ? " line remains" : " lines remain")
      << " uncovered. Write additional test cases for the same method that "
         "cover the remaining lines.";
  return out.str();
}

std::vector<Contribution> contribution_table(std::span<const CandidateTest> candidates) {
  using Pair = std::pair<std::string, std::string>;
  std::vector<Pair> order;
  std::map<Pair, std::set<std::string>> bodies;
  std::map<std::string, std::set<Pair>> owners;
  for (const CandidateTest& c : candidates) {
    Pair key{c.origin.model_id, base_prompt_name(c.origin.prompt_name)};
    if (!bodies.count(key)) {
      order.push_back(key);
      bodies[key];
    }
    if (!c.accepted()) continue;
    bodies[key].insert(c.test.normalized_body);
    owners[c.test.normalized_body].insert(key);
  }
  std::vector<Contribution> out;
  for (const Pair& key : order) {
    Contribution row{key.first, key.second, 0, 0};
    for (const std::string& body : bodies[key]) {
      ++row.accepted_count;
      if (owners[body].size() == 1) ++row.unique_count;
    }
    out.push_back(row);
  }
  return out;
}

// --- pipeline ------------------------------------------------------------------

Pipeline::Pipeline(PipelineOptions options, const ProjectManifest& manifest,
                   ExecBackend& backend, LlmProvider& provider)
    : options_(std::move(options)), manifest_(manifest), backend_(backend),
      provider_(provider) {
  if (options_.flaky_runs < 1) {
    throw Error(ErrorCode::kUsage, "flaky run count must be at least 1");
  }
}

std::optional<std::string> Pipeline::class_under_test_key(
    const BuildTarget& target, const fs::path& test_class) const {
  auto cut = target.class_under_test_for(test_class);
  if (!cut) return std::nullopt;
  fs::path workdir = manifest_.backend.workdir.empty() ? manifest_.root
                                                       : manifest_.backend.workdir;
  fs::path rel = cut->lexically_relative(workdir);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return cut->generic_string();
}

void Pipeline::prepare_target(const BuildTarget& target, PipelineState& state) {
  std::string fingerprint_src = target.build_command + "\n" + target.test_command +
                                "\n" + target.coverage_artifact + "\n";
  std::vector<TestClassSource> classes;
  for (const fs::path& path : target.test_class_paths) {
    classes.push_back(load_test_class(path, options_.dialect));
    fingerprint_src += path.string() + "\n" + sha256_hex(classes.back().raw_text) + "\n";
  }
  std::string fingerprint = sha256_hex(fingerprint_src);

  TargetState& ts = state.targets[target.id];
  if (ts.baseline_fingerprint != fingerprint) {
    CoverageMap baseline;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const TestClassSource& cls = classes[i];
      CandidateSource src;
      src.candidate_id = "baseline-" + target.id + "-" + std::to_string(i);
      src.test_class = target.test_class_paths[i];
      src.class_text = cls.raw_text;
      src.class_name = cls.class_name;
      ScratchLease lease(backend_, src.candidate_id);
      ExecOutcome built = backend_.build(src, target);
      if (!built.ok()) {
        throw Error(ErrorCode::kInfraError,
                    "existing test class does not build: " + src.test_class.string() +
                        "\n" + excerpt(built.stderr_excerpt));
      }
      for (const TestCase& t : cls.test_cases) {
        baseline = coverage_union(baseline, backend_.measure_coverage(src, t, target));
      }
    }
    ts = TargetState{};
    ts.baseline_fingerprint = fingerprint;
    ts.original_baseline = baseline;
    ts.working_baseline = baseline;
  }
  for (const TestClassSource& cls : classes) {
    for (const TestCase& t : cls.test_cases) ts.remember(t);
  }
}

void Pipeline::judge(CandidateTest& c, const BuildTarget& target,
                     const TestClassSource& test_class, RunMode mode,
                     TargetState& state) {
  c.hints = classify_hints(c.test);
  if (state.seen(c.test)) {
    c.verdict = {Stage::kDuplicate, "body already present for this target"};
    return;
  }

  CandidateSource src;
  src.candidate_id = c.candidate_id;
  src.test_class = c.test_class;
  src.class_name = test_class.class_name;
  src.added_test = c.test;
  try {
    src.class_text = reassemble(test_class, std::span<const TestCase>(&c.test, 1));
  } catch (const Error& e) {
    c.verdict = {Stage::kNoParse, e.what()};
    return;
  }

  ScratchLease lease(backend_, src.candidate_id);
  try {
    ExecOutcome built = backend_.build(src, target);
    if (!built.ok()) {
      std::string detail = built.status == ExecStatus::kTimeout
                               ? std::string("build timed out")
                               : excerpt(built.stderr_excerpt);
      c.verdict = {Stage::kBuildFailed, detail};
      return;
    }
    RunSeries series = backend_.run_repeated(src, c.test, target, options_.flaky_runs);
    switch (classify_runs(series, options_.flaky_runs)) {
      case RunVerdict::kFailedFirstRun:
        c.verdict = {Stage::kFailedFirstRun,
                     std::string(exec_status_name(series.outcomes.front().status)) +
                         ": " + excerpt(series.outcomes.front().stderr_excerpt)};
        return;
      case RunVerdict::kFlaky:
        c.verdict = {Stage::kFlaky, "failed run " + std::to_string(series.outcomes.size()) +
                                        " of " + std::to_string(options_.flaky_runs)};
        return;
      case RunVerdict::kNonFlaky:
        break;
    }
    CoverageMap covered = backend_.measure_coverage(src, c.test, target);
    const CoverageMap& baseline = mode == RunMode::kEvaluation ? state.original_baseline
                                                               : state.working_baseline;
    CoverageDelta delta =
        coverage_delta(covered, baseline, class_under_test_key(target, c.test_class));
    c.hints.integration_like = delta.integration_like();
    c.delta = delta;
    if (delta.empty()) {
      c.verdict = {Stage::kNoCoverageGain, ""};
      return;
    }
    c.verdict = {Stage::kAccepted, ""};
    if (mode == RunMode::kDeployment && c.recommended()) {
      state.working_baseline = coverage_union(state.working_baseline, covered);
      state.remember(c.test);
      state.accepted_ids.push_back(c.candidate_id);
    }
  } catch (const Error& e) {
    if (!is_infrastructure_error(e.code())) throw;
    c.delta.reset();
    c.verdict = {Stage::kInfraError, e.what()};
  }
}

std::vector<CandidateTest> Pipeline::run_round(
    const BuildTarget& target, const TestClassSource& test_class,
    const std::string& prompt, const std::string& prompt_name,
    const LlmConfig& config, RunMode mode, TargetState& state, bool allow_reprompt) {
  const fs::path class_path = test_class.path;
  const std::string class_key = class_path.lexically_relative(manifest_.root).generic_string();
  auto make_id = [&](int sample, int index) {
    std::ostringstream key;
    key << options_.seed << '|' << target.id << '|' << class_key << '|'
        << config.model_id << '|' << format_temperature(config.temperature) << '|'
        << prompt_name << '|' << sample << '|' << index;
    return "c" + sha256_hex(key.str()).substr(0, 15);
  };
  auto base_candidate = [&](int sample, int index, const std::string& request_id) {
    CandidateTest c;
    c.candidate_id = make_id(sample, index);
    c.test_class = class_path;
    c.origin = {config.model_id, prompt_name, config.temperature, sample, request_id};
    return c;
  };

  std::vector<CandidateTest> out;
  GenerationResult generation;
  try {
    generation = provider_.generate(prompt, config);
  } catch (const Error& e) {
    if (!is_infrastructure_error(e.code())) throw;
    CandidateTest c = base_candidate(0, 0, "");
    c.verdict = {Stage::kInfraError, e.what()};
    out.push_back(std::move(c));
    return out;
  }

  if (generation.responses.empty()) {
    CandidateTest c = base_candidate(0, 0, generation.request_id);
    c.verdict = {Stage::kNoParse, "provider returned no responses"};
    out.push_back(std::move(c));
    return out;
  }
  for (std::size_t s = 0; s < generation.responses.size(); ++s) {
    const int sample = static_cast<int>(s);
    std::vector<TestCase> extracted;
    std::string failure;
    try {
      extracted =
          extract_response_tests(test_class, generation.responses[s], options_.dialect);
      if (extracted.empty()) failure = "no new test cases in response";
    } catch (const Error& e) {
      failure = e.what();
    }
    if (extracted.empty()) {
      CandidateTest c = base_candidate(sample, 0, generation.request_id);
      c.verdict = {Stage::kNoParse, failure};
      out.push_back(std::move(c));
      continue;
    }
    for (std::size_t i = 0; i < extracted.size(); ++i) {
      CandidateTest c = base_candidate(sample, static_cast<int>(i), generation.request_id);
      c.test = std::move(extracted[i]);
      judge(c, target, test_class, mode, state);
      out.push_back(std::move(c));
      if (!allow_reprompt || !options_.reprompt || !out.back().accepted()) continue;

      CandidateTest& accepted = out.back();
      if (target.method_spans.empty()) {
        accepted.reprompt_status = "no_method_annotation";
        continue;
      }
      std::optional<std::string> follow_up;
      for (const MethodSpan& span : target.method_spans) {
        follow_up = detect_reprompt(accepted, span, prompt);
        if (follow_up) break;
      }
      if (!follow_up) {
        accepted.reprompt_status = "not_needed";
        continue;
      }
      const std::size_t slot = out.size() - 1;
      std::vector<CandidateTest> extra =
          run_round(target, test_class, *follow_up,
                    prompt_name + std::string(kRepromptSuffix) + "@" + accepted.candidate_id,
                    config, mode, state, false);
      bool productive = std::any_of(extra.begin(), extra.end(),
                                    [](const CandidateTest& e) { return e.accepted(); });
      out[slot].reprompt_status = productive ? "productive" : "fruitless";
      for (CandidateTest& e : extra) {
        e.origin.prompt_name = prompt_name + std::string(kRepromptSuffix);
        out.push_back(std::move(e));
      }
    }
  }
  return out;
}

std::vector<CandidateTest> Pipeline::run_trial(const BuildTarget& target,
                                               const TestClassSource& test_class,
                                               const PromptTemplate& tmpl,
                                               const LlmConfig& config, RunMode mode,
                                               PipelineState& state) {
  auto it = state.targets.find(target.id);
  if (it == state.targets.end()) {
    throw Error(ErrorCode::kPreconditionViolation,
                "target " + target.id + " has no baseline; call prepare_target first");
  }
  std::optional<std::string> cut_text;
  if (auto cut = target.class_under_test_for(test_class.path)) cut_text = read_text(*cut);
  std::string prompt = render(tmpl, test_class.raw_text, cut_text);
  return run_round(target, test_class, prompt, tmpl.name, config, mode, it->second, true);
}

EnsembleResult Pipeline::ensemble_run(const BuildTarget& target,
                                      const TestClassSource& test_class,
                                      std::span<const PromptTemplate> templates,
                                      std::span<const LlmConfig> configs, RunMode mode,
                                      PipelineState& state) {
  struct Job {
    const LlmConfig* config;
    const PromptTemplate* tmpl;
  };
  std::vector<Job> jobs;
  for (const LlmConfig& c : configs) {
    for (const PromptTemplate& t : templates) jobs.push_back({&c, &t});
  }
  std::vector<std::vector<CandidateTest>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());

  const int workers = mode == RunMode::kEvaluation
                          ? std::max(1, std::min<int>(options_.jobs, static_cast<int>(jobs.size())))
                          : 1;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_trial(target, test_class, *jobs[i].tmpl, *jobs[i].config, mode, state);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EnsembleResult result;
  for (auto& r : results) {
    for (CandidateTest& c : r) result.candidates.push_back(std::move(c));
  }
  result.contributions = contribution_table(result.candidates);
  return result;
}

}  // namespace testgen
