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

#include "testgen/promptkit.h"

#include <set>

#include "gtest/gtest.h"
#include "test_util.h"
#include "testgen/error.h"

namespace testgen {
namespace {

TEST(Promptkit, ExtendTestRendering) {
  EXPECT_EQ(render(*find_builtin_template("extend_test"), "CLASS", std::nullopt),
            "Here is a Kotlin unit test class: CLASS. Write an extended version "
            "of the test class that includes additional tests to cover some "
            "extra corner cases.");
}

TEST(Promptkit, ExtendCoverageSubstitutesInOrder) {
  std::string out =
      render(*find_builtin_template("extend_coverage"), "T", std::string("C"));
  EXPECT_NE(out.find("it tests: T C. Write"), std::string::npos);
}

TEST(Promptkit, MissingClassUnderTest) {
  for (const char* name :
       {"extend_coverage", "corner_cases", "statement_to_complete"}) {
    try {
      render(*find_builtin_template(name), "T", std::nullopt);
      FAIL() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMissingClassUnderTest);
    }
  }
}

TEST(Promptkit, OnlyExtendTestWorksWithoutClassUnderTest) {
  ASSERT_EQ(builtin_templates().size(), 4u);
  for (const PromptTemplate& t : builtin_templates()) {
    EXPECT_EQ(t.requires_class_under_test, t.name != "extend_test") << t.name;
  }
}

TEST(Promptkit, GoldenFiles) {
  for (const PromptTemplate& t : builtin_templates()) {
    std::string golden =
        test_util::read_fixture("golden/prompts/" + t.name + ".txt");
    EXPECT_EQ(render(t, "<<EXISTING_TEST_CLASS>>",
                     std::string("<<CLASS_UNDER_TEST>>")),
              golden)
        << t.name;
  }
}

TEST(Promptkit, NoResidualPlaceholdersAndNoRecursiveSubstitution) {
  for (const PromptTemplate& t : builtin_templates()) {
    std::string out = render(t, "class T { val s = \"{class_under_test}\" }",
                             std::string("class C {}"));
    EXPECT_EQ(out.find("{existing_test_class}"), std::string::npos);
    // The placeholder text inside the argument survives verbatim.
    EXPECT_NE(out.find("\"{class_under_test}\""), std::string::npos);
  }
}

TEST(Promptkit, InjectiveInTestClass) {
  for (const PromptTemplate& t : builtin_templates()) {
    std::set<std::string> seen;
    for (const char* input : {"", "a", "b", "ab", "a b", "a\n"}) {
      EXPECT_TRUE(seen.insert(render(t, input, std::string("C"))).second);
    }
  }
}

TEST(Promptkit, CustomTemplates) {
  PromptTemplate t = make_custom_template("terse", "Extend: {existing_test_class}");
  EXPECT_FALSE(t.requires_class_under_test);
  EXPECT_EQ(render(t, "X", std::nullopt), "Extend: X");
  EXPECT_TRUE(make_custom_template("both", "{existing_test_class}/{class_under_test}")
                  .requires_class_under_test);
  EXPECT_THROW(make_custom_template("extend_test", "{existing_test_class}"), Error);
  EXPECT_THROW(make_custom_template("bad", "no placeholder"), Error);
}

}  // namespace
}  // namespace testgen
