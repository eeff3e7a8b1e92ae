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

#include <set>

#include "gtest/gtest.h"
#include "test_util.h"
#include "testgen/error.h"

namespace testgen {
namespace {

namespace fs = std::filesystem;

constexpr const char* kFooTest = R"(class FooTest {
    @Test
    fun testA() {
        assertEquals(1, foo())
    }
}
)";

constexpr const char* kBarTest = R"(class BarTest {
    @Test
    fun testB() {
        assertTrue(bar())
    }

    @Test
    fun testC() {
        assertFalse(!bar())
    }
}
)";

nlohmann::json minimal_manifest() {
  return nlohmann::json::parse(R"({
    "root": ".",
    "dialect": {},
    "backend": {"kind": "command"},
    "targets": [{
      "id": "foo",
      "test_classes": ["tests/FooTest.kt"],
      "class_under_test": {"tests/FooTest.kt": "src/Foo.kt"},
      "build_command": "make",
      "test_command": "run {test_name}",
      "coverage_artifact": "cov.info"
    }]
  })");
}

TEST(LoadManifest, MinimalInstanceResolvesPaths) {
  test_util::TempDir dir;
  test_util::write_file(dir.path() / "tests/FooTest.kt", kFooTest);
  test_util::write_file(dir.path() / "src/Foo.kt", "class Foo {}\n");
  test_util::write_file(dir.path() / "m.json", minimal_manifest().dump());

  ProjectManifest m = load_manifest(dir.path() / "m.json");
  ASSERT_EQ(m.targets.size(), 1u);
  const BuildTarget& t = m.targets[0];
  EXPECT_EQ(t.id, "foo");
  ASSERT_EQ(t.test_class_paths.size(), 1u);
  EXPECT_TRUE(t.test_class_paths[0].is_absolute());
  EXPECT_EQ(t.test_class_paths[0], (dir.path() / "tests/FooTest.kt").lexically_normal());
  EXPECT_EQ(*t.class_under_test_for(t.test_class_paths[0]),
            (dir.path() / "src/Foo.kt").lexically_normal());
  EXPECT_EQ(m.backend.flaky_runs, 5);
  EXPECT_EQ(m.llm.default_model, "LLM2");
  EXPECT_EQ(m.dialect.test_marker, "@Test");
  EXPECT_EQ(m.all_prompts().size(), 4u);
}

TEST(LoadManifest, NonexistentTestClassIsMissingFile) {
  test_util::TempDir dir;
  test_util::write_file(dir.path() / "src/Foo.kt", "class Foo {}\n");
  test_util::write_file(dir.path() / "m.json", minimal_manifest().dump());
  try {
    load_manifest(dir.path() / "m.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFile);
    EXPECT_NE(std::string(e.what()).find("FooTest.kt"), std::string::npos);
  }
}

TEST(LoadManifest, SchemaErrorsAreEnumerated) {
  nlohmann::json j = minimal_manifest();
  j.erase("dialect");
  j["backend"]["flaky_runs"] = 0;
  j["targets"][0].erase("id");
  j["targets"][0]["test_command"] = "run all";
  j["targets"][0]["colour"] = "blue";
  try {
    manifest_from_json(j, "/tmp/m.json");
    FAIL();
  } catch (const SchemaError& e) {
    std::set<std::string> paths;
    for (const SchemaIssue& i : e.issues()) paths.insert(i.field_path);
    EXPECT_EQ(paths, (std::set<std::string>{
                         "dialect", "backend.flaky_runs", "targets[0].id",
                         "targets[0].test_command", "targets[0].colour"}));
  }
}

TEST(LoadManifest, ClassInTwoTargetsRejected) {
  nlohmann::json j = minimal_manifest();
  j["targets"].push_back(j["targets"][0]);
  j["targets"][1]["id"] = "foo2";
  EXPECT_THROW(manifest_from_json(j, "/tmp/m.json"), SchemaError);
}

TEST(LoadManifest, CustomPromptsAndDialectOverrides) {
  nlohmann::json j = minimal_manifest();
  j["dialect"] = {{"extra_assertion_tokens", {"checkThat"}}};
  j["prompts"] = {{{"name", "mine"}, {"template", "Improve {existing_test_class}"}}};
  j["llm"] = {{"provider", "http"}, {"default_model", "LLM1"}};
  test_util::TempDir dir;
  test_util::write_file(dir.path() / "tests/FooTest.kt", kFooTest);
  test_util::write_file(dir.path() / "src/Foo.kt", "class Foo {}\n");
  ProjectManifest m = manifest_from_json(j, dir.path() / "m.json");
  EXPECT_EQ(m.dialect.assertion_tokens.back(), "checkThat");
  ASSERT_NE(m.find_prompt("mine"), nullptr);
  EXPECT_NE(m.find_prompt("extend_coverage"), nullptr);
  EXPECT_EQ(m.llm.default_model, "LLM1");
  EXPECT_FALSE(m.llm.endpoint.empty());

  j["prompts"][0]["name"] = "corner_cases";
  EXPECT_THROW(manifest_from_json(j, dir.path() / "m.json"), SchemaError);
}

TEST(BaselineTests, TwoTargetsSharingDirectoryAreDisjoint) {
  test_util::TempDir dir;
  test_util::write_file(dir.path() / "tests/FooTest.kt", kFooTest);
  test_util::write_file(dir.path() / "tests/BarTest.kt", kBarTest);
  nlohmann::json j = minimal_manifest();
  j["targets"].push_back({{"id", "bar"},
                          {"test_classes", {"tests/BarTest.kt"}},
                          {"class_under_test", nlohmann::json::object()},
                          {"build_command", "make"},
                          {"test_command", "run {test_name}"},
                          {"coverage_artifact", "cov.info"}});
  j["targets"][0]["class_under_test"] = nlohmann::json::object();
  test_util::write_file(dir.path() / "m.json", j.dump());

  ProjectManifest m = load_manifest(dir.path() / "m.json");
  ASSERT_EQ(m.targets.size(), 2u);
  auto foo = baseline_tests(*m.find_target("foo"), m.dialect);
  auto bar = baseline_tests(*m.find_target("bar"), m.dialect);
  std::set<std::string> foo_names, bar_names;
  for (const auto& b : foo) foo_names.insert(b.test_class.string() + "#" + b.test.name);
  for (const auto& b : bar) bar_names.insert(b.test_class.string() + "#" + b.test.name);
  EXPECT_EQ(foo_names.size(), 1u);
  EXPECT_EQ(bar_names.size(), 2u);
  for (const auto& n : foo_names) EXPECT_EQ(bar_names.count(n), 0u);
  EXPECT_EQ(bar[0].test.name, "testB");
  EXPECT_EQ(bar[1].test.name, "testC");
}

TEST(BaselineTests, ParseErrorNamesTheFile) {
  test_util::TempDir dir;
  test_util::write_file(dir.path() / "tests/FooTest.kt", "class FooTest {\n");
  test_util::write_file(dir.path() / "src/Foo.kt", "");
  ProjectManifest m = manifest_from_json(minimal_manifest(), dir.path() / "m.json");
  try {
    baseline_tests(m.targets[0], m.dialect);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnbalancedBraces);
    EXPECT_NE(std::string(e.what()).find("FooTest.kt"), std::string::npos);
  }
}

TEST(ScanCorpus, OneTargetPerTestDirectory) {
  test_util::TempDir dir;
  // (test class, class under test or "" when absent/ambiguous)
  const std::vector<std::pair<std::string, std::string>> layout = {
      {"a/FooTest.kt", "src/Foo.kt"},
      {"a/BarTest.kt", ""},
      {"b/c/BazTest.kt", "b/Baz.kt"},
      {"b/c/DupTest.kt", ""},
  };
  for (const auto& [test, source] : layout) test_util::write_file(dir.path() / test, kFooTest);
  test_util::write_file(dir.path() / "src/Foo.kt", "");
  test_util::write_file(dir.path() / "b/Baz.kt", "");
  test_util::write_file(dir.path() / "x/Dup.kt", "");
  test_util::write_file(dir.path() / "y/Dup.kt", "");
  test_util::write_file(dir.path() / "notes.txt", "");

  ScanOptions options;
  options.build_command = "make";
  options.test_command = "run {test_name}";
  options.coverage_artifact = "cov.info";
  nlohmann::json manifest = scan_corpus(dir.path(), options);

  std::map<std::string, std::map<std::string, std::string>> expected;
  for (const auto& [test, source] : layout) {
    expected[fs::path(test).parent_path().string()][test] = source;
  }
  ASSERT_EQ(manifest["targets"].size(), expected.size());
  for (const auto& target : manifest["targets"]) {
    const auto& want = expected.at(target["id"].get<std::string>());
    std::set<std::string> classes;
    for (const auto& c : target["test_classes"]) classes.insert(c.get<std::string>());
    EXPECT_EQ(classes.size(), want.size());
    for (const auto& [test, source] : want) {
      EXPECT_EQ(classes.count(test), 1u);
      if (source.empty()) {
        EXPECT_FALSE(target["class_under_test"].contains(test));
      } else {
        EXPECT_EQ(target["class_under_test"][test], source);
      }
    }
  }

  test_util::write_file(dir.path() / "m.json", manifest.dump(2));
  ProjectManifest loaded = load_manifest(dir.path() / "m.json");
  EXPECT_EQ(loaded.targets.size(), 2u);
}

}  // namespace
}  // namespace testgen
