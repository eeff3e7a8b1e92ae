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

#include "testgen/telemetry.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "testgen/error.h"

namespace testgen {

namespace fs = std::filesystem;

namespace {

nlohmann::json hints_json(const HintFlags& h) {
  return {{"missing_assertion", h.missing_assertion},
          {"todo_marker", h.todo_marker},
          {"integration_like", h.integration_like}};
}

HintFlags hints_from_json(const nlohmann::json& j) {
  HintFlags h;
  h.missing_assertion = j.value("missing_assertion", false);
  h.todo_marker = j.value("todo_marker", false);
  h.integration_like = j.value("integration_like", false);
  return h;
}

bool reached_built(Stage s) {
  return s == Stage::kFailedFirstRun || s == Stage::kFlaky ||
         s == Stage::kNoCoverageGain || s == Stage::kAccepted;
}
bool reached_passed(Stage s) {
  return s == Stage::kFlaky || s == Stage::kNoCoverageGain || s == Stage::kAccepted;
}
bool reached_non_flaky(Stage s) {
  return s == Stage::kNoCoverageGain || s == Stage::kAccepted;
}

// Percentage of `count` in `total`, half-up to two decimals, trailing zeros
// dropped: "75", "12.5", "33.33".
std::string percent(std::size_t count, std::size_t total) {
  unsigned long long h = (20000ULL * count + total) / (2ULL * total);
  std::string out = std::to_string(h / 100);
  unsigned long long frac = h % 100;
  if (frac != 0) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), ".%02llu", frac);
    std::string f(buf);
    while (f.back() == '0') f.pop_back();
    out += f;
  }
  return out;
}

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start + 1));
    start = nl + 1;
  }
  return lines;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

// --- records -------------------------------------------------------------------

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j = {{"timestamp", r.timestamp},
                      {"target_id", r.target_id},
                      {"test_class_path", r.test_class_path},
                      {"model_id", r.model_id},
                      {"prompt_name", r.prompt_name},
                      {"temperature", r.temperature},
                      {"sample_index", r.sample_index},
                      {"stage_reached", stage_name(r.stage_reached)},
                      {"total_new_lines", r.total_new_lines},
                      {"new_files_count", r.new_files_count},
                      {"extended_files_count", r.extended_files_count},
                      {"hint_flags", hints_json(r.hint_flags)},
                      {"mode", run_mode_name(r.mode)},
                      {"candidate_id", r.candidate_id},
                      {"test_name", r.test_name},
                      {"request_id", r.request_id},
                      {"platform_tag", r.platform_tag},
                      {"detail", r.detail}};
  if (!r.reprompt_status.empty()) j["reprompt_status"] = r.reprompt_status;
  if (r.delta) j["delta"] = to_json(*r.delta);
  return j;
}

TrialRecord trial_record_from_json(const nlohmann::json& j) {
  TrialRecord r;
  r.timestamp = j.value("timestamp", std::string());
  r.target_id = j.at("target_id").get<std::string>();
  r.test_class_path = j.at("test_class_path").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.prompt_name = j.at("prompt_name").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.sample_index = j.value("sample_index", 0);
  r.stage_reached = parse_stage(j.at("stage_reached").get<std::string>());
  r.total_new_lines = j.value("total_new_lines", std::size_t{0});
  r.new_files_count = j.value("new_files_count", std::size_t{0});
  r.extended_files_count = j.value("extended_files_count", std::size_t{0});
  if (j.contains("hint_flags")) r.hint_flags = hints_from_json(j.at("hint_flags"));
  r.mode = parse_run_mode(j.value("mode", std::string("evaluation")));
  r.candidate_id = j.value("candidate_id", std::string());
  r.test_name = j.value("test_name", std::string());
  r.request_id = j.value("request_id", std::string());
  r.platform_tag = j.value("platform_tag", std::string());
  r.detail = j.value("detail", std::string());
  r.reprompt_status = j.value("reprompt_status", std::string());
  if (j.contains("delta")) r.delta = coverage_delta_from_json(j.at("delta"));
  return r;
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TrialRecord make_trial_record(const CandidateTest& c, const std::string& target_id,
                              const std::string& test_class_path,
                              const std::string& platform_tag, RunMode mode,
                              std::string timestamp) {
  TrialRecord r;
  r.timestamp = std::move(timestamp);
  r.target_id = target_id;
  r.test_class_path = test_class_path;
  r.model_id = c.origin.model_id;
  r.prompt_name = c.origin.prompt_name;
  r.temperature = c.origin.temperature;
  r.sample_index = c.origin.sample_index;
  r.stage_reached = c.verdict.stage;
  if (c.delta) {
    r.total_new_lines = c.delta->total_new_lines;
    r.new_files_count = c.delta->new_files.size();
    r.extended_files_count = c.delta->extended_files.size();
    r.delta = c.delta;
  }
  r.hint_flags = c.hints;
  r.mode = mode;
  r.candidate_id = c.candidate_id;
  r.test_name = c.test.name;
  r.request_id = c.origin.request_id;
  r.platform_tag = platform_tag;
  r.detail = c.verdict.detail;
  r.reprompt_status = c.reprompt_status;
  return r;
}

TelemetryWriter::TelemetryWriter(const fs::path& path) : path_(path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
}

void TelemetryWriter::append(const TrialRecord& record) {
  std::string line = to_json(record).dump() + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIoError, "cannot append to " + path_.string());
}

std::vector<TrialRecord> parse_telemetry(std::string_view text) {
  std::vector<TrialRecord> out;
  std::vector<SchemaIssue> issues;
  int line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    std::string s(line);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) continue;
    try {
      out.push_back(trial_record_from_json(nlohmann::json::parse(s)));
    } catch (const std::exception& e) {
      issues.push_back({"line " + std::to_string(line_no), e.what()});
    }
  }
  if (!issues.empty()) throw SchemaError(std::move(issues));
  return out;
}

std::vector<TrialRecord> read_telemetry(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_telemetry(ss.str());
}

// --- aggregation ---------------------------------------------------------------

long long rate_hundredths(std::size_t successes, std::size_t total) {
  return static_cast<long long>((200ULL * successes + total) / (2ULL * total));
}

std::string format_rate(std::size_t successes, std::size_t total) {
  if (total == 0) return "-";
  long long h = rate_hundredths(successes, total);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld", h / 100, h % 100);
  return buf;
}

FunnelLevel parse_funnel_level(std::string_view name) {
  if (name == "test_case" || name == "case") return FunnelLevel::kTestCase;
  if (name == "test_class" || name == "class") return FunnelLevel::kTestClass;
  throw Error(ErrorCode::kUsage, "unknown funnel level '" + std::string(name) + "'");
}

const FunnelStage& FunnelStats::stage(std::string_view name) const {
  for (const FunnelStage& s : stages) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::kUsage, "no funnel stage '" + std::string(name) + "'");
}

FunnelStats funnel_stats(std::span<const TrialRecord> records, FunnelLevel level) {
  using Pred = bool (*)(Stage);
  const std::vector<std::pair<std::string, Pred>> gates = {
      {"generated", [](Stage) { return true; }},
      {"built", reached_built},
      {"passed", reached_passed},
      {"non_flaky", reached_non_flaky},
      {"improves", [](Stage s) { return s == Stage::kAccepted; }},
  };
  FunnelStats stats;
  stats.level = level;
  std::vector<std::set<std::string>> classes(gates.size());
  std::vector<std::size_t> counts(gates.size(), 0);
  for (const TrialRecord& r : records) {
    if (r.stage_reached == Stage::kInfraError) {
      ++stats.infra_errors;
      continue;
    }
    ++stats.trials;
    if (r.stage_reached == Stage::kAccepted) ++stats.successes;
    std::string key = r.target_id + "\n" + r.test_class_path;
    for (std::size_t g = 0; g < gates.size(); ++g) {
      if (!gates[g].second(r.stage_reached)) continue;
      ++counts[g];
      classes[g].insert(key);
    }
  }
  stats.total = level == FunnelLevel::kTestCase ? counts[0] : classes[0].size();
  for (std::size_t g = 0; g < gates.size(); ++g) {
    FunnelStage s;
    s.name = gates[g].first;
    s.count = level == FunnelLevel::kTestCase ? counts[g] : classes[g].size();
    if (stats.total > 0) s.fraction = static_cast<double>(s.count) / stats.total;
    stats.stages.push_back(s);
  }
  return stats;
}

SuccessTable success_table(std::span<const TrialRecord> records, std::string_view group_by) {
  static const std::set<std::string> known = {"temperature", "model_id", "prompt_name",
                                              "platform_tag"};
  SuccessTable table;
  std::string spec(group_by);
  std::stringstream ss(spec);
  std::string field;
  while (std::getline(ss, field, ',')) {
    field.erase(std::remove_if(field.begin(), field.end(), ::isspace), field.end());
    if (!known.count(field)) {
      throw Error(ErrorCode::kUnknownGroupField, "unknown group field '" + field + "'");
    }
    table.fields.push_back(field);
  }
  if (table.fields.empty()) {
    throw Error(ErrorCode::kUnknownGroupField, "empty group field list");
  }

  auto value_of = [](const TrialRecord& r, const std::string& f) -> std::string {
    if (f == "temperature") return format_temperature(r.temperature);
    if (f == "model_id") return r.model_id;
    if (f == "prompt_name") return r.prompt_name;
    return r.platform_tag;
  };
  std::map<std::vector<std::string>, std::pair<std::size_t, std::size_t>> groups;
  for (const TrialRecord& r : records) {
    if (r.stage_reached == Stage::kInfraError) continue;
    std::vector<std::string> key;
    for (const std::string& f : table.fields) key.push_back(value_of(r, f));
    auto& [s, t] = groups[key];
    ++t;
    if (r.stage_reached == Stage::kAccepted) ++s;
  }
  for (const auto& [key, st] : groups) {
    table.rows.push_back({key, st.first, st.second, format_rate(st.first, st.second)});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [&](const SuccessRow& a, const SuccessRow& b) {
                     for (std::size_t i = 0; i < table.fields.size(); ++i) {
                       if (a.group[i] == b.group[i]) continue;
                       if (table.fields[i] == "temperature") {
                         return std::stod(a.group[i]) > std::stod(b.group[i]);
                       }
                       return a.group[i] < b.group[i];
                     }
                     return false;
                   });
  return table;
}

std::string sankey_export(std::span<const TrialRecord> records) {
  std::map<Stage, std::size_t> n;
  std::size_t total = 0;
  for (const TrialRecord& r : records) {
    if (r.stage_reached == Stage::kInfraError) continue;
    ++n[r.stage_reached];
    ++total;
  }
  if (total == 0) return "";
  std::size_t built = n[Stage::kFailedFirstRun] + n[Stage::kFlaky] +
                      n[Stage::kNoCoverageGain] + n[Stage::kAccepted];
  std::size_t passed = n[Stage::kFlaky] + n[Stage::kNoCoverageGain] + n[Stage::kAccepted];
  std::size_t non_flaky = n[Stage::kNoCoverageGain] + n[Stage::kAccepted];
  const std::vector<std::tuple<const char*, std::size_t, const char*>> flows = {
      {"generated", n[Stage::kNoParse], "no_parse"},
      {"generated", n[Stage::kDuplicate], "duplicate"},
      {"generated", n[Stage::kBuildFailed], "build_failed"},
      {"generated", built, "built"},
      {"built", n[Stage::kFailedFirstRun], "failed"},
      {"built", passed, "passed"},
      {"passed", n[Stage::kFlaky], "flaky"},
      {"passed", non_flaky, "non_flaky"},
      {"non_flaky", n[Stage::kNoCoverageGain], "no_gain"},
      {"non_flaky", n[Stage::kAccepted], "improves"},
  };
  std::string out;
  for (const auto& [from, count, to] : flows) {
    if (count == 0) continue;
    out += std::string(from) + " [" + percent(count, total) + "] " + to + "\n";
  }
  return out;
}

std::string format_funnel(const FunnelStats& stats) {
  std::ostringstream out;
  out << "level: " << (stats.level == FunnelLevel::kTestCase ? "test_case" : "test_class")
      << "\n";
  out << "total: " << stats.total << "\n";
  out << pad("stage", 12) << pad("count", 10) << "fraction\n";
  for (const FunnelStage& s : stats.stages) {
    out << pad(s.name, 12) << pad(std::to_string(s.count), 10)
        << format_rate(s.count, stats.total) << "\n";
  }
  out << "success rate: " << stats.successes << "/" << stats.trials << " = "
      << format_rate(stats.successes, stats.trials) << "\n";
  if (stats.infra_errors > 0) out << "infra errors: " << stats.infra_errors << "\n";
  return out.str();
}

std::string format_success_table(const SuccessTable& table) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = table.fields;
  header.insert(header.end(), {"successes", "trials", "rate"});
  cells.push_back(header);
  for (const SuccessRow& r : table.rows) {
    std::vector<std::string> row = r.group;
    row.insert(row.end(), {std::to_string(r.successes), std::to_string(r.trials), r.rate});
    cells.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += i + 1 == row.size() ? row[i] : pad(row[i], width[i] + 2);
    }
    out += "\n";
  }
  return out;
}

std::string format_contributions(std::span<const Contribution> rows) {
  std::size_t model_w = 8, prompt_w = 8;
  for (const Contribution& c : rows) {
    model_w = std::max(model_w, c.model_id.size());
    prompt_w = std::max(prompt_w, c.prompt_name.size());
  }
  std::string out = pad("model", model_w + 2) + pad("prompt", prompt_w + 2) +
                    "accepted  unique\n";
  for (const Contribution& c : rows) {
    out += pad(c.model_id, model_w + 2) + pad(c.prompt_name, prompt_w + 2) +
           pad(std::to_string(c.accepted_count), 10) + std::to_string(c.unique_count) + "\n";
  }
  return out;
}

// --- diffs ---------------------------------------------------------------------

nlohmann::json ImprovementDiff::sidecar() const {
  return {{"diff_id", diff_id},
          {"target_id", target_id},
          {"test_class_path", test_class_path},
          {"test_name", test_name},
          {"summary", summary},
          {"flags", {{"integration_like", integration_like}}},
          {"delta", to_json(delta)},
          {"origin",
           {{"model_id", origin.model_id},
            {"prompt_name", origin.prompt_name},
            {"temperature", origin.temperature},
            {"sample_index", origin.sample_index},
            {"request_id", origin.request_id}}}};
}

std::string coverage_summary(const std::string& test_name, const CoverageDelta& delta,
                             const TestClassSource& original,
                             const std::string& test_class_path,
                             const std::optional<std::string>& class_under_test) {
  std::ostringstream out;
  out << kMachineMarker << "\n";
  out << "New test: " << test_name << "\n";
  std::size_t files = delta.newly_covered.size();
  out << "Coverage gain: " << plural(delta.total_new_lines, "line") << " in "
      << plural(files, "file") << " (" << delta.new_files.size() << " new, "
      << delta.extended_files.size() << " extended)\n";
  for (const auto& [file, lines] : delta.newly_covered) {
    out << file << ": +" << plural(lines.size(), "line") << " (" << format_line_ranges(lines)
        << ")\n";
  }
  auto list = [](const std::set<std::string>& s) {
    if (s.empty()) return std::string("none");
    std::string r;
    for (const std::string& f : s) r += (r.empty() ? "" : ", ") + f;
    return r;
  };
  out << "New files: " << list(delta.new_files) << "\n";
  out << "Extended files: " << list(delta.extended_files) << "\n";
  out << "Non-regression: all " << plural(original.test_cases.size(), "existing test")
      << " in " << test_class_path
      << " are retained verbatim; this change adds exactly one test.\n";
  if (delta.integration_like()) {
    long pct = std::lround(*delta.off_target_fraction * 100);
    out << "Warning: off-target coverage. " << pct << "% of the new lines are outside "
        << class_under_test.value_or("the class under test")
        << "; this test behaves more like an integration test.\n";
  }
  return out.str();
}

std::string unified_diff(std::string_view before, std::string_view after,
                         const std::string& path, int context) {
  std::vector<std::string_view> a = split_lines(before), b = split_lines(after);
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
    ++suffix;
  if (prefix == a.size() && prefix == b.size()) return "";

  std::size_t ctx = static_cast<std::size_t>(context);
  std::size_t start = prefix > ctx ? prefix - ctx : 0;
  std::size_t a_end = std::min(a.size(), a.size() - suffix + ctx);
  std::size_t b_end = std::min(b.size(), b.size() - suffix + ctx);
  std::size_t a_len = a_end - start, b_len = b_end - start;

  auto line = [](std::string_view l) {
    std::string s(l);
    if (s.empty() || s.back() != '\n') s += "\n\\ No newline at end of file\n";
    return s;
  };
  std::ostringstream out;
  out << "--- a/" << path << "\n+++ b/" << path << "\n";
  out << "@@ -" << (a_len ? start + 1 : start) << "," << a_len << " +"
      << (b_len ? start + 1 : start) << "," << b_len << " @@\n";
  for (std::size_t i = start; i < prefix; ++i) out << " " << line(a[i]);
  for (std::size_t i = prefix; i < a.size() - suffix; ++i) out << "-" << line(a[i]);
  for (std::size_t i = prefix; i < b.size() - suffix; ++i) out << "+" << line(b[i]);
  for (std::size_t i = a.size() - suffix; i < a_end; ++i) out << " " << line(a[i]);
  return out.str();
}

ImprovementDiff emit_diff(const CandidateTest& accepted, const TestClassSource& original,
                          const std::string& target_id, const std::string& test_class_path,
                          const std::optional<std::string>& class_under_test) {
  if (!accepted.accepted() || !accepted.delta) {
    throw Error(ErrorCode::kPreconditionViolation,
                "emit_diff needs an accepted candidate; " + accepted.candidate_id +
                    " reached " + std::string(stage_name(accepted.verdict.stage)));
  }
  ImprovementDiff d;
  d.diff_id = accepted.candidate_id;
  d.target_id = target_id;
  d.test_class_path = test_class_path;
  d.test_name = accepted.test.name;
  d.new_class_text = reassemble(original, std::span<const TestCase>(&accepted.test, 1));
  d.unified_diff = unified_diff(original.raw_text, d.new_class_text, test_class_path);
  d.delta = *accepted.delta;
  d.integration_like = d.delta.integration_like();
  d.origin = accepted.origin;
  d.summary = coverage_summary(d.test_name, d.delta, original, test_class_path,
                               class_under_test);
  return d;
}

void write_diff(const fs::path& dir, const ImprovementDiff& diff) {
  fs::create_directories(dir);
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  };
  write(dir / (diff.diff_id + ".diff"), diff.summary + "\n" + diff.unified_diff);
  write(dir / (diff.diff_id + ".json"), diff.sidecar().dump(2) + "\n");
}

std::string format_hint(const CandidateTest& c, const std::string& test_class_path) {
  std::ostringstream out;
  out << kMachineMarker << " test need: " << c.test.name << " in " << test_class_path << "\n";
  out << "Flags:";
  if (c.hints.missing_assertion) out << " missing_assertion";
  if (c.hints.todo_marker) out << " todo_marker";
  if (c.hints.integration_like) out << " integration_like";
  out << "\n";
  if (c.delta) {
    out << "Coverage gain: " << plural(c.delta->total_new_lines, "line") << "\n";
    for (const auto& [file, lines] : c.delta->newly_covered) {
      out << file << ": +" << plural(lines.size(), "line") << " ("
          << format_line_ranges(lines) << ")\n";
    }
  }
  out << c.test.body_text << "\n\n";
  return out.str();
}

}  // namespace testgen
