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

#include "testgen/workflow.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "testgen/error.h"
#include "testgen/exec_backend.h"

namespace testgen {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

std::vector<const BuildTarget*> select_targets(const ProjectManifest& manifest,
                                               const std::vector<std::string>& ids) {
  std::vector<const BuildTarget*> out;
  if (ids.empty()) {
    for (const BuildTarget& t : manifest.targets) out.push_back(&t);
    return out;
  }
  for (const std::string& id : ids) {
    const BuildTarget* t = manifest.find_target(id);
    if (!t) throw Error(ErrorCode::kUsage, "--target: unknown target '" + id + "'");
    out.push_back(t);
  }
  return out;
}

std::vector<PromptTemplate> select_prompts(const ProjectManifest& manifest,
                                           const std::vector<std::string>& names) {
  if (names.empty()) return {*manifest.find_prompt(kDefaultPrompt)};
  std::vector<PromptTemplate> out;
  std::set<std::string> seen;
  for (const std::string& name : names) {
    if (name == "all") {
      for (const PromptTemplate& t : manifest.all_prompts()) {
        if (seen.insert(t.name).second) out.push_back(t);
      }
      continue;
    }
    const PromptTemplate* t = manifest.find_prompt(name);
    if (!t) throw Error(ErrorCode::kUsage, "--prompt: unknown template '" + name + "'");
    if (seen.insert(t->name).second) out.push_back(*t);
  }
  return out;
}

std::vector<LlmConfig> select_configs(const WorkflowOptions& options,
                                      const LlmSettings& llm) {
  std::vector<std::string> models = options.models;
  if (models.empty()) models.push_back(llm.default_model);
  double temperature = options.temperature.value_or(0.0);
  if (temperature < 0.0 || temperature > 2.0) {
    throw Error(ErrorCode::kUsage, "--temp: temperature must lie in [0, 2]");
  }
  std::vector<LlmConfig> out;
  for (const std::string& model : models) {
    if (model.empty()) throw Error(ErrorCode::kUsage, "--llm: empty model id");
    LlmConfig base;
    base.model_id = model;
    base.temperature = temperature;
    base.samples_per_prompt = llm.samples_per_prompt;
    base.max_tokens = llm.max_tokens;
    base.provider = llm.provider;
    for (const LlmConfig& c : sweep_configs(base, options.temp_sweep)) out.push_back(c);
  }
  return out;
}

std::string relative_to(const fs::path& path, const fs::path& root) {
  return path.lexically_relative(root).generic_string();
}

struct RunLog {
  std::vector<TrialRecord> records;
  std::vector<CandidateTest> candidates;
  std::vector<std::string> hint_entries;
  std::vector<std::string> reprompt_notes;
};

std::string compose_report(const WorkflowSummary& summary, const RunLog& log, RunMode mode) {
  std::ostringstream out;
  out << kMachineMarker << " " << run_mode_name(mode) << " run\n";
  out << "candidates: " << summary.candidates << "\n";
  out << "accepted: " << summary.accepted << "\n";
  if (mode == RunMode::kDeployment) out << "diffs: " << summary.diffs << "\n";
  out << "infra errors: " << summary.infra_errors << "\n\n";
  out << "== funnel (test classes)\n"
      << format_funnel(funnel_stats(log.records, FunnelLevel::kTestClass)) << "\n";
  out << "== funnel (test cases)\n"
      << format_funnel(funnel_stats(log.records, FunnelLevel::kTestCase)) << "\n";
  for (const char* group : {"temperature", "model_id", "prompt_name"}) {
    out << "== success by " << group << "\n"
        << format_success_table(success_table(log.records, group)) << "\n";
  }
  out << "== contributions\n" << format_contributions(contribution_table(log.candidates));
  if (!log.reprompt_notes.empty()) {
    out << "\n== re-prompting\n";
    for (const std::string& note : log.reprompt_notes) out << note << "\n";
  }
  if (!log.hint_entries.empty()) {
    out << "\n== test need hints\n";
    for (const std::string& hint : log.hint_entries) out << hint;
  }
  if (!summary.warnings.empty()) {
    out << "\n== warnings\n";
    for (const std::string& w : summary.warnings) out << w << "\n";
  }
  return out.str();
}

}  // namespace

std::shared_ptr<LlmProvider> make_provider(const LlmSettings& settings) {
  std::shared_ptr<LlmProvider> provider;
  switch (settings.provider) {
    case ProviderKind::kStub:
      provider = std::make_shared<StubProvider>(StubProvider::from_file(settings.stub_script));
      break;
    case ProviderKind::kReplay:
      provider = std::make_shared<ReplayProvider>(ReplayProvider::from_file(settings.cassette));
      break;
    case ProviderKind::kHttp: {
      HttpOptions http;
      http.endpoint = settings.endpoint;
      if (const char* key = std::getenv(settings.api_key_env.c_str())) http.api_key = key;
      http.timeout = std::chrono::milliseconds(static_cast<long long>(settings.timeout_s * 1000));
      http.max_attempts = settings.max_attempts;
      provider = std::make_shared<HttpProvider>(http);
      break;
    }
  }
  if (!settings.record_cassette.empty()) {
    provider = std::make_shared<RecordingProvider>(provider, settings.record_cassette);
  }
  return provider;
}

WorkflowSummary run_workflow(const WorkflowOptions& options) {
  if (options.jobs < 1) throw Error(ErrorCode::kUsage, "--jobs: must be at least 1");
  if (options.runs && *options.runs < 1) {
    throw Error(ErrorCode::kUsage, "--runs: must be at least 1");
  }
  ProjectManifest manifest = load_manifest(options.manifest);
  std::vector<const BuildTarget*> targets = select_targets(manifest, options.targets);
  std::vector<PromptTemplate> prompts = select_prompts(manifest, options.prompts);
  std::vector<LlmConfig> configs = select_configs(options, manifest.llm);

  std::unique_ptr<ExecBackend> backend = make_backend(manifest.backend);
  std::shared_ptr<LlmProvider> provider = make_provider(manifest.llm);

  PipelineOptions popts;
  popts.dialect = manifest.dialect;
  popts.flaky_runs = options.runs.value_or(manifest.backend.flaky_runs);
  popts.seed = options.seed;
  popts.jobs = options.jobs;
  Pipeline pipeline(popts, manifest, *backend, *provider);

  const RunMode mode = options.mode;
  const fs::path out_dir = options.out_dir;
  fs::create_directories(out_dir);
  const fs::path state_path = out_dir / "state.json";
  PipelineState state = mode == RunMode::kDeployment ? PipelineState::load(state_path)
                                                     : PipelineState{};
  TelemetryWriter telemetry(out_dir / "telemetry.jsonl");
  auto now = options.clock ? options.clock : utc_timestamp;

  WorkflowSummary summary;
  RunLog log;
  for (const BuildTarget* target : targets) {
    try {
      pipeline.prepare_target(*target, state);
    } catch (const Error& e) {
      if (!is_infrastructure_error(e.code())) throw;
      ++summary.infra_errors;
      summary.warnings.push_back("target " + target->id + ": baseline failed: " + e.what());
      continue;
    }
    for (const fs::path& class_path : target->test_class_paths) {
      const std::string rel_class = relative_to(class_path, manifest.root);
      TestClassSource test_class = load_test_class(class_path, manifest.dialect);
      const bool has_cut = target->class_under_test_for(class_path).has_value();
      std::vector<PromptTemplate> usable;
      for (const PromptTemplate& t : prompts) {
        if (t.requires_class_under_test && !has_cut) {
          summary.warnings.push_back("skipped template " + t.name + " for " + rel_class +
                                     ": no class under test mapped");
          continue;
        }
        usable.push_back(t);
      }
      summary.configurations += usable.size() * configs.size();
      if (usable.empty()) continue;

      EnsembleResult result;
      try {
        result = pipeline.ensemble_run(*target, test_class, usable, configs, mode, state);
      } catch (const Error& e) {
        if (!is_infrastructure_error(e.code())) throw;
        ++summary.infra_errors;
        summary.warnings.push_back(rel_class + ": " + e.what());
        continue;
      }

      const std::optional<std::string> cut = pipeline.class_under_test_key(*target, class_path);
      for (CandidateTest& c : result.candidates) {
        TrialRecord record =
            make_trial_record(c, target->id, rel_class, target->platform_tag, mode, now());
        telemetry.append(record);
        log.records.push_back(std::move(record));
        ++summary.candidates;
        if (c.verdict.stage == Stage::kInfraError) ++summary.infra_errors;
        if (!c.accepted()) continue;
        ++summary.accepted;
        if (c.reprompt_status == "fruitless") {
          log.reprompt_notes.push_back(c.candidate_id + " " + c.test.name + " in " + rel_class +
                                       ": partial method coverage, follow-up round added nothing");
        }
        if (!c.recommended()) {
          ++summary.hints;
          log.hint_entries.push_back(format_hint(c, rel_class));
          continue;
        }
        if (mode == RunMode::kDeployment) {
          write_diff(out_dir / "diffs", emit_diff(c, test_class, target->id, rel_class, cut));
          ++summary.diffs;
        }
      }
      for (CandidateTest& c : result.candidates) log.candidates.push_back(std::move(c));
    }
    if (mode == RunMode::kDeployment) state.save(state_path);
  }

  if (mode == RunMode::kDeployment && !log.hint_entries.empty()) {
    std::string hints;
    for (const std::string& h : log.hint_entries) hints += h;
    write_text(out_dir / "hints.txt", hints);
  }
  write_text(out_dir / "sankey.txt", sankey_export(log.records));
  summary.report = compose_report(summary, log, mode);
  write_text(out_dir / "report.txt", summary.report);
  return summary;
}

std::string run_report(const ReportOptions& options) {
  std::vector<TrialRecord> records = read_telemetry(options.telemetry);
  std::ostringstream out;
  if (options.group_by.empty() && !options.level) {
    out << format_funnel(funnel_stats(records, FunnelLevel::kTestClass)) << "\n"
        << format_funnel(funnel_stats(records, FunnelLevel::kTestCase)) << "\n"
        << sankey_export(records);
    return out.str();
  }
  if (options.level) out << format_funnel(funnel_stats(records, *options.level));
  for (std::size_t i = 0; i < options.group_by.size(); ++i) {
    if (i > 0 || options.level) out << "\n";
    out << format_success_table(success_table(records, options.group_by[i]));
  }
  return out.str();
}

void run_corpus_scan(const fs::path& root, const ScanOptions& scan, const fs::path& output) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::kMissingFile, "missing file: " + root.string());
  }
  nlohmann::json manifest = scan_corpus(root, scan);
  // Root is stored relative to the manifest's own directory.
  fs::path rel = fs::relative(fs::absolute(root), fs::absolute(output).parent_path());
  manifest["root"] = rel.empty() ? "." : rel.generic_string();
  write_text(output, manifest.dump(2) + "\n");
}

}  // namespace testgen
