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

// The project under improvement, as described by a JSON manifest:
//
//   {
//     "root": ".",
//     "dialect": {"test_marker": "@Test", "assertion_tokens": [...]},
//     "backend": {"kind": "command", "flaky_runs": 5, "timeout_s": 120},
//     "llm": {"provider": "replay", "cassette": "calls.jsonl",
//             "default_model": "LLM2"},
//     "targets": [{
//       "id": "calc",
//       "test_classes": ["tests/CalcTest.kt"],
//       "class_under_test": {"tests/CalcTest.kt": "src/calc.py"},
//       "build_command": "python3 tools/build.py {test_class}",
//       "test_command": "python3 tools/run.py {test_class} {test_name}",
//       "coverage_artifact": "coverage.info"
//     }]
//   }
//
// Relative paths resolve against the manifest's directory (root) and then
// against root (everything else).

#ifndef TESTGEN_CORPUS_H_
#define TESTGEN_CORPUS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "testgen/coverage.h"
#include "testgen/dialect.h"
#include "testgen/llm_gateway.h"
#include "testgen/promptkit.h"

namespace testgen {

enum class BackendKind { kCommand, kMock };

struct BackendConfig {
  BackendKind kind = BackendKind::kCommand;
  // Defaults for targets that do not set their own commands.
  std::string build_command;
  std::string test_command;
  std::string coverage_artifact;
  int flaky_runs = 5;
  // Directory copied into each scratch workspace. Defaults to the root.
  std::filesystem::path workdir;
  double timeout_s = 300;
  bool parallel_safe = false;
  std::filesystem::path scratch_root;
  nlohmann::json mock;  // rules for the mock backend
};

struct LlmSettings {
  ProviderKind provider = ProviderKind::kStub;
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string default_model = "LLM2";
  std::filesystem::path cassette;         // replay source
  std::filesystem::path stub_script;      // stub rules
  std::filesystem::path record_cassette;  // append every call here if set
  int samples_per_prompt = 1;
  int max_tokens = 2048;
  double timeout_s = 60;
  int max_attempts = 4;
};

// Line set of one method, for re-prompting on partial method coverage.
struct MethodSpan {
  std::string file;
  std::string name;
  LineSet lines;
};

struct BuildTarget {
  std::string id;
  std::vector<std::filesystem::path> test_class_paths;
  std::map<std::filesystem::path, std::filesystem::path> class_under_test;
  std::string build_command;
  std::string test_command;
  std::string coverage_artifact;
  std::string platform_tag;
  std::vector<MethodSpan> method_spans;

  std::optional<std::filesystem::path> class_under_test_for(
      const std::filesystem::path& test_class) const;
};

struct ProjectManifest {
  std::filesystem::path path;
  std::filesystem::path root;
  DialectConfig dialect;
  BackendConfig backend;
  LlmSettings llm;
  std::vector<PromptTemplate> custom_prompts;
  std::vector<BuildTarget> targets;

  const BuildTarget* find_target(const std::string& id) const;
  // Built-ins first, then custom templates.
  std::vector<PromptTemplate> all_prompts() const;
  const PromptTemplate* find_prompt(const std::string& name) const;
};

// Throws SchemaError listing every problem found, or Error(kMissingFile).
ProjectManifest load_manifest(const std::filesystem::path& path);
ProjectManifest manifest_from_json(const nlohmann::json& j,
                                   const std::filesystem::path& manifest_path);

nlohmann::json dialect_to_json(const DialectConfig& config);

struct BaselineTest {
  std::filesystem::path test_class;
  TestCase test;
};

// Every existing test case of the target, in class order then source order.
// Parse errors are rethrown with the file name prefixed.
std::vector<BaselineTest> baseline_tests(const BuildTarget& target,
                                         const DialectConfig& dialect);

TestClassSource load_test_class(const std::filesystem::path& path,
                                const DialectConfig& dialect);

struct ScanOptions {
  std::string extension = ".kt";
  std::string build_command;
  std::string test_command;
  std::string coverage_artifact;
};

// One target per directory holding `*Test<ext>` files; class under test is
// `<Name><ext>` when exactly one such file exists under the root.
nlohmann::json scan_corpus(const std::filesystem::path& root,
                           const ScanOptions& options);

}  // namespace testgen

#endif  // TESTGEN_CORPUS_H_
