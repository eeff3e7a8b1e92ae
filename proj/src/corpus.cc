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

#include "testgen/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "testgen/error.h"

namespace testgen {

namespace fs = std::filesystem;

namespace {

// Walks a JSON document and records every schema problem instead of stopping
// at the first one.
class Checker {
 public:
  void issue(const std::string& path, const std::string& message) {
    issues_.push_back({path, message});
  }
  bool ok() const { return issues_.empty(); }
  std::vector<SchemaIssue> take() { return std::move(issues_); }

  void allow_keys(const nlohmann::json& obj, const std::string& path,
                  std::initializer_list<const char*> keys) {
    if (!obj.is_object()) return;
    for (const auto& [key, value] : obj.items()) {
      bool known = std::any_of(keys.begin(), keys.end(),
                               [&](const char* k) { return key == k; });
      if (!known) issue(join(path, key), "unknown field");
    }
  }

  std::optional<std::string> string(const nlohmann::json& obj,
                                    const std::string& path, const char* key,
                                    bool required) {
    if (!obj.contains(key)) {
      if (required) issue(join(path, key), "required");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) {
      issue(join(path, key), "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<long long> integer(const nlohmann::json& obj,
                                   const std::string& path, const char* key,
                                   long long min) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < min) {
      issue(join(path, key), "must be an integer >= " + std::to_string(min));
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<double> number(const nlohmann::json& obj,
                               const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number() || v.get<double>() <= 0) {
      issue(join(path, key), "must be a positive number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<bool> boolean(const nlohmann::json& obj,
                              const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_boolean()) {
      issue(join(path, key), "must be a boolean");
      return std::nullopt;
    }
    return obj.at(key).get<bool>();
  }

  std::optional<std::vector<std::string>> strings(const nlohmann::json& obj,
                                                  const std::string& path,
                                                  const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_array() ||
        !std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_string(); })) {
      issue(join(path, key), "must be an array of strings");
      return std::nullopt;
    }
    return v.get<std::vector<std::string>>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<SchemaIssue> issues_;
};

constexpr const char* kDefaultEndpoint =
    "https://api.openai.com/v1/chat/completions";

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

DialectConfig parse_dialect(const nlohmann::json& j, Checker& check) {
  DialectConfig d;
  if (!j.is_object()) {
    check.issue("dialect", "must be an object");
    return d;
  }
  check.allow_keys(j, "dialect",
                   {"test_marker", "class_keyword", "function_keyword",
                    "assertion_tokens", "extra_assertion_tokens", "todo_token"});
  if (auto v = check.string(j, "dialect", "test_marker", false)) d.test_marker = *v;
  if (auto v = check.string(j, "dialect", "class_keyword", false)) d.class_keyword = *v;
  if (auto v = check.string(j, "dialect", "function_keyword", false))
    d.function_keyword = *v;
  if (auto v = check.string(j, "dialect", "todo_token", false)) d.todo_token = *v;
  if (auto v = check.strings(j, "dialect", "assertion_tokens")) d.assertion_tokens = *v;
  if (auto v = check.strings(j, "dialect", "extra_assertion_tokens")) {
    d.assertion_tokens.insert(d.assertion_tokens.end(), v->begin(), v->end());
  }
  if (d.test_marker.empty()) check.issue("dialect.test_marker", "must not be empty");
  return d;
}

BackendConfig parse_backend(const nlohmann::json& j, const fs::path& root,
                            Checker& check) {
  BackendConfig b;
  b.workdir = root;
  if (!j.is_object()) {
    check.issue("backend", "must be an object");
    return b;
  }
  check.allow_keys(j, "backend",
                   {"kind", "build_command", "test_command", "coverage_artifact",
                    "flaky_runs", "workdir", "timeout_s", "parallel_safe",
                    "scratch_root", "mock"});
  if (auto v = check.string(j, "backend", "kind", false)) {
    if (*v == "command") {
      b.kind = BackendKind::kCommand;
    } else if (*v == "mock") {
      b.kind = BackendKind::kMock;
    } else {
      check.issue("backend.kind", "must be \"command\" or \"mock\"");
    }
  }
  if (auto v = check.string(j, "backend", "build_command", false)) b.build_command = *v;
  if (auto v = check.string(j, "backend", "test_command", false)) b.test_command = *v;
  if (auto v = check.string(j, "backend", "coverage_artifact", false))
    b.coverage_artifact = *v;
  if (auto v = check.integer(j, "backend", "flaky_runs", 1)) b.flaky_runs = static_cast<int>(*v);
  if (auto v = check.string(j, "backend", "workdir", false)) b.workdir = resolve(root, *v);
  if (auto v = check.number(j, "backend", "timeout_s")) b.timeout_s = *v;
  if (auto v = check.boolean(j, "backend", "parallel_safe")) b.parallel_safe = *v;
  if (auto v = check.string(j, "backend", "scratch_root", false))
    b.scratch_root = resolve(root, *v);
  if (j.contains("mock")) {
    if (!j.at("mock").is_object()) {
      check.issue("backend.mock", "must be an object");
    } else {
      b.mock = j.at("mock");
    }
  }
  return b;
}

LlmSettings parse_llm(const nlohmann::json& j, const fs::path& root,
                      Checker& check) {
  LlmSettings s;
  if (!j.is_object()) {
    check.issue("llm", "must be an object");
    return s;
  }
  check.allow_keys(j, "llm",
                   {"provider", "endpoint", "api_key_env", "default_model",
                    "cassette", "stub_script", "record_cassette",
                    "samples_per_prompt", "max_tokens", "timeout_s",
                    "max_attempts"});
  if (auto v = check.string(j, "llm", "provider", false)) {
    try {
      s.provider = parse_provider_kind(*v);
    } catch (const Error&) {
      check.issue("llm.provider", "must be one of http, stub, replay");
    }
  }
  if (auto v = check.string(j, "llm", "endpoint", false)) s.endpoint = *v;
  if (auto v = check.string(j, "llm", "api_key_env", false)) s.api_key_env = *v;
  if (auto v = check.string(j, "llm", "default_model", false)) s.default_model = *v;
  if (auto v = check.string(j, "llm", "cassette", false)) s.cassette = resolve(root, *v);
  if (auto v = check.string(j, "llm", "stub_script", false))
    s.stub_script = resolve(root, *v);
  if (auto v = check.string(j, "llm", "record_cassette", false))
    s.record_cassette = resolve(root, *v);
  if (auto v = check.integer(j, "llm", "samples_per_prompt", 1))
    s.samples_per_prompt = static_cast<int>(*v);
  if (auto v = check.integer(j, "llm", "max_tokens", 1)) s.max_tokens = static_cast<int>(*v);
  if (auto v = check.number(j, "llm", "timeout_s")) s.timeout_s = *v;
  if (auto v = check.integer(j, "llm", "max_attempts", 1))
    s.max_attempts = static_cast<int>(*v);

  if (s.provider == ProviderKind::kHttp && s.endpoint.empty())
    s.endpoint = kDefaultEndpoint;
  if (s.provider == ProviderKind::kReplay && s.cassette.empty())
    check.issue("llm.cassette", "required for the replay provider");
  if (s.provider == ProviderKind::kStub && s.stub_script.empty())
    check.issue("llm.stub_script", "required for the stub provider");
  return s;
}

std::vector<MethodSpan> parse_method_spans(const nlohmann::json& j,
                                           const std::string& path,
                                           const fs::path& root,
                                           Checker& check) {
  std::vector<MethodSpan> spans;
  if (!j.is_array()) {
    check.issue(path, "must be an array");
    return spans;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    const auto& e = j[i];
    if (!e.is_object()) {
      check.issue(p, "must be an object");
      continue;
    }
    check.allow_keys(e, p, {"file", "name", "lines", "first", "last"});
    MethodSpan span;
    auto file = check.string(e, p, "file", true);
    if (file) span.file = resolve(root, *file).string();
    span.name = check.string(e, p, "name", false).value_or("");
    if (e.contains("lines")) {
      if (!e["lines"].is_array()) {
        check.issue(p + ".lines", "must be an array of line numbers");
      } else {
        for (const auto& l : e["lines"]) {
          if (!l.is_number_integer() || l.get<int>() <= 0) {
            check.issue(p + ".lines", "line numbers must be positive integers");
            break;
          }
          span.lines.insert(l.get<int>());
        }
      }
    } else {
      auto first = check.integer(e, p, "first", 1);
      auto last = check.integer(e, p, "last", 1);
      if (!first || !last || *last < *first) {
        check.issue(p, "needs lines[] or first <= last");
      } else {
        for (long long l = *first; l <= *last; ++l) span.lines.insert(static_cast<int>(l));
      }
    }
    spans.push_back(std::move(span));
  }
  return spans;
}

}  // namespace

std::optional<fs::path> BuildTarget::class_under_test_for(
    const fs::path& test_class) const {
  auto it = class_under_test.find(test_class);
  if (it == class_under_test.end()) return std::nullopt;
  return it->second;
}

const BuildTarget* ProjectManifest::find_target(const std::string& id) const {
  for (const BuildTarget& t : targets) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<PromptTemplate> ProjectManifest::all_prompts() const {
  std::vector<PromptTemplate> out = builtin_templates();
  out.insert(out.end(), custom_prompts.begin(), custom_prompts.end());
  return out;
}

const PromptTemplate* ProjectManifest::find_prompt(const std::string& name) const {
  if (const PromptTemplate* t = find_builtin_template(name)) return t;
  for (const PromptTemplate& t : custom_prompts) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

nlohmann::json dialect_to_json(const DialectConfig& config) {
  return {{"test_marker", config.test_marker},
          {"class_keyword", config.class_keyword},
          {"function_keyword", config.function_keyword},
          {"assertion_tokens", config.assertion_tokens},
          {"todo_token", config.todo_token}};
}

ProjectManifest manifest_from_json(const nlohmann::json& j,
                                   const fs::path& manifest_path) {
  Checker check;
  ProjectManifest m;
  m.path = fs::absolute(manifest_path).lexically_normal();
  if (!j.is_object()) {
    check.issue("", "manifest must be a JSON object");
    throw SchemaError(check.take());
  }
  check.allow_keys(j, "", {"root", "dialect", "backend", "llm", "prompts",
                           "platform_tag", "targets"});

  fs::path base = m.path.parent_path();
  auto root = check.string(j, "", "root", true);
  m.root = resolve(base, root.value_or("."));

  if (j.contains("dialect")) {
    m.dialect = parse_dialect(j["dialect"], check);
  } else {
    check.issue("dialect", "required");
  }
  if (j.contains("backend")) {
    m.backend = parse_backend(j["backend"], m.root, check);
  } else {
    check.issue("backend", "required");
  }
  if (j.contains("llm")) {
    m.llm = parse_llm(j["llm"], m.root, check);
  } else {
    m.llm.provider = ProviderKind::kHttp;
    m.llm.endpoint = kDefaultEndpoint;
  }
  std::string platform_tag = check.string(j, "", "platform_tag", false).value_or("");

  if (j.contains("prompts")) {
    const auto& prompts = j["prompts"];
    if (!prompts.is_array()) {
      check.issue("prompts", "must be an array");
    } else {
      for (std::size_t i = 0; i < prompts.size(); ++i) {
        std::string p = "prompts[" + std::to_string(i) + "]";
        check.allow_keys(prompts[i], p, {"name", "template"});
        auto name = check.string(prompts[i], p, "name", true);
        auto text = check.string(prompts[i], p, "template", true);
        if (!name || !text) continue;
        try {
          m.custom_prompts.push_back(make_custom_template(*name, *text));
        } catch (const Error& e) {
          check.issue(p, e.what());
        }
      }
    }
  }

  if (!j.contains("targets") || !j["targets"].is_array() || j["targets"].empty()) {
    check.issue("targets", "must be a non-empty array");
  } else {
    std::set<std::string> ids;
    std::set<fs::path> owned;
    const auto& targets = j["targets"];
    for (std::size_t i = 0; i < targets.size(); ++i) {
      std::string p = "targets[" + std::to_string(i) + "]";
      const auto& t = targets[i];
      if (!t.is_object()) {
        check.issue(p, "must be an object");
        continue;
      }
      check.allow_keys(t, p, {"id", "test_classes", "class_under_test",
                              "build_command", "test_command",
                              "coverage_artifact", "platform_tag",
                              "method_spans"});
      BuildTarget target;
      target.id = check.string(t, p, "id", true).value_or("");
      if (target.id.empty()) {
        check.issue(p + ".id", "must be a non-empty string");
      } else if (!ids.insert(target.id).second) {
        check.issue(p + ".id", "duplicate target id '" + target.id + "'");
      }
      auto classes = check.strings(t, p, "test_classes");
      if (!classes || classes->empty()) {
        check.issue(p + ".test_classes", "must be a non-empty array of paths");
      } else {
        for (const std::string& c : *classes) {
          fs::path abs = resolve(m.root, c);
          if (!owned.insert(abs).second) {
            check.issue(p + ".test_classes",
                        "'" + c + "' already belongs to another target");
          }
          target.test_class_paths.push_back(abs);
        }
      }
      if (t.contains("class_under_test")) {
        const auto& cut = t["class_under_test"];
        if (!cut.is_object()) {
          check.issue(p + ".class_under_test", "must be an object");
        } else {
          for (const auto& [test_class, source] : cut.items()) {
            fs::path key = resolve(m.root, test_class);
            if (!source.is_string()) {
              check.issue(p + ".class_under_test." + test_class, "must be a string");
              continue;
            }
            if (std::find(target.test_class_paths.begin(),
                          target.test_class_paths.end(),
                          key) == target.test_class_paths.end()) {
              check.issue(p + ".class_under_test." + test_class,
                          "not one of the target's test_classes");
            }
            target.class_under_test[key] = resolve(m.root, source.get<std::string>());
          }
        }
      }
      target.build_command =
          check.string(t, p, "build_command", false).value_or(m.backend.build_command);
      target.test_command =
          check.string(t, p, "test_command", false).value_or(m.backend.test_command);
      target.coverage_artifact = check.string(t, p, "coverage_artifact", false)
                                     .value_or(m.backend.coverage_artifact);
      target.platform_tag =
          check.string(t, p, "platform_tag", false).value_or(platform_tag);
      if (t.contains("method_spans")) {
        target.method_spans =
            parse_method_spans(t["method_spans"], p + ".method_spans", m.root, check);
      }
      if (m.backend.kind == BackendKind::kCommand) {
        if (target.build_command.empty())
          check.issue(p + ".build_command", "required for the command backend");
        if (target.test_command.find("{test_name}") == std::string::npos)
          check.issue(p + ".test_command", "must contain {test_name}");
        if (target.coverage_artifact.empty())
          check.issue(p + ".coverage_artifact", "required for the command backend");
      }
      m.targets.push_back(std::move(target));
    }
  }
  if (!check.ok()) throw SchemaError(check.take());

  std::vector<fs::path> missing;
  if (!fs::is_directory(m.root)) missing.push_back(m.root);
  for (const BuildTarget& t : m.targets) {
    for (const fs::path& p : t.test_class_paths) {
      if (!fs::is_regular_file(p)) missing.push_back(p);
    }
    for (const auto& [test_class, source] : t.class_under_test) {
      if (!fs::is_regular_file(source)) missing.push_back(source);
    }
  }
  if (m.llm.provider == ProviderKind::kReplay && !fs::is_regular_file(m.llm.cassette))
    missing.push_back(m.llm.cassette);
  if (m.llm.provider == ProviderKind::kStub && !fs::is_regular_file(m.llm.stub_script))
    missing.push_back(m.llm.stub_script);
  if (!missing.empty()) {
    std::string message = "missing file: " + missing.front().string();
    for (std::size_t i = 1; i < missing.size(); ++i)
      message += ", " + missing[i].string();
    throw Error(ErrorCode::kMissingFile, message);
  }
  return m;
}

ProjectManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw SchemaError(std::vector<SchemaIssue>{{"", "not valid JSON"}});
  }
  return manifest_from_json(j, path);
}

TestClassSource load_test_class(const fs::path& path,
                                const DialectConfig& dialect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_test_class(ss.str(), dialect, path.string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<BaselineTest> baseline_tests(const BuildTarget& target,
                                         const DialectConfig& dialect) {
  std::vector<BaselineTest> out;
  for (const fs::path& path : target.test_class_paths) {
    TestClassSource source = load_test_class(path, dialect);
    for (TestCase& t : source.test_cases) out.push_back({path, std::move(t)});
  }
  return out;
}

nlohmann::json scan_corpus(const fs::path& root, const ScanOptions& options) {
  const std::string suffix = "Test" + options.extension;
  std::map<fs::path, std::vector<fs::path>> by_dir;
  std::map<std::string, std::vector<fs::path>> sources_by_name;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    fs::path rel = fs::relative(entry.path(), root);
    std::string name = rel.filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
      by_dir[rel.parent_path()].push_back(rel);
    } else if (name.ends_with(options.extension)) {
      sources_by_name[name].push_back(rel);
    }
  }

  nlohmann::json targets = nlohmann::json::array();
  for (auto& [dir, classes] : by_dir) {
    std::sort(classes.begin(), classes.end());
    nlohmann::json cut = nlohmann::json::object();
    nlohmann::json class_list = nlohmann::json::array();
    for (const fs::path& c : classes) {
      class_list.push_back(c.generic_string());
      std::string stem = c.filename().string();
      stem = stem.substr(0, stem.size() - suffix.size()) + options.extension;
      auto it = sources_by_name.find(stem);
      if (it != sources_by_name.end() && it->second.size() == 1) {
        cut[c.generic_string()] = it->second.front().generic_string();
      }
    }
    std::string id = dir.empty() ? "root" : dir.generic_string();
    targets.push_back({{"id", id},
                       {"test_classes", class_list},
                       {"class_under_test", cut},
                       {"build_command", options.build_command},
                       {"test_command", options.test_command},
                       {"coverage_artifact", options.coverage_artifact}});
  }
  return {{"root", "."},
          {"dialect", dialect_to_json(DialectConfig{})},
          {"backend", {{"kind", "command"}, {"flaky_runs", 5}}},
          {"llm", {{"provider", "http"},
                   {"endpoint", kDefaultEndpoint},
                   {"default_model", "LLM2"}}},
          {"targets", targets}};
}

}  // namespace testgen
