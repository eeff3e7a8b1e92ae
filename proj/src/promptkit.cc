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

#include "testgen/error.h"

namespace testgen {

const std::vector<PromptTemplate>& builtin_templates() {
  static const std::vector<PromptTemplate> kTemplates = {
      {"extend_test",
       "Here is a Kotlin unit test class: {existing_test_class}. Write an "
       "extended version of the test class that includes additional tests to "
       "cover some extra corner cases.",
       false},
      {"extend_coverage",
       "Here is a Kotlin unit test class and the class that it tests: "
       "{existing_test_class} {class_under_test}. Write an extended version "
       "of the test class that includes additional unit tests that will "
       "increase the test coverage of the class under test.",
       true},
      {"corner_cases",
       "Here is a Kotlin unit test class and the class that it tests: "
       "{existing_test_class} {class_under_test}. Write an extended version "
       "of the test class that includes additional unit tests that will "
       "cover corner cases missed by the original and will increase the test "
       "coverage of the class under test.",
       true},
      {"statement_to_complete",
       "Here is a Kotlin class under test {class_under_test} This class under "
       "test can be tested with this Kotlin unit test class "
       "{existing_test_class}. Here is an extended version of the unit test "
       "class that includes additional unit test cases that will cover "
       "methods, edge cases, corner cases, and other features of the class "
       "under test that were missed by the original unit test class:",
       true},
  };
  return kTemplates;
}

const PromptTemplate* find_builtin_template(std::string_view name) {
  for (const PromptTemplate& t : builtin_templates()) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

bool is_builtin_template(std::string_view name) {
  return find_builtin_template(name) != nullptr;
}

PromptTemplate make_custom_template(std::string name, std::string text) {
  if (is_builtin_template(name) || name == "all") {
    throw Error(ErrorCode::kSchemaError,
                "prompt name '" + name + "' is reserved");
  }
  if (text.find(kTestClassPlaceholder) == std::string::npos) {
    throw Error(ErrorCode::kSchemaError,
                "prompt '" + name + "' lacks {existing_test_class}");
  }
  bool needs_cut = text.find(kClassUnderTestPlaceholder) != std::string::npos;
  return PromptTemplate{std::move(name), std::move(text), needs_cut};
}

std::string render(const PromptTemplate& tmpl, std::string_view test_class,
                   const std::optional<std::string>& class_under_test) {
  if (tmpl.requires_class_under_test && !class_under_test) {
    throw Error(ErrorCode::kMissingClassUnderTest,
                "prompt '" + tmpl.name + "' needs the class under test");
  }
  std::string_view text = tmpl.template_text;
  std::string out;
  out.reserve(text.size() + test_class.size() +
              (class_under_test ? class_under_test->size() : 0));
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text.substr(pos).starts_with(kTestClassPlaceholder)) {
      out += test_class;
      pos += kTestClassPlaceholder.size();
    } else if (text.substr(pos).starts_with(kClassUnderTestPlaceholder)) {
      if (class_under_test) out += *class_under_test;
      pos += kClassUnderTestPlaceholder.size();
    } else {
      out.push_back(text[pos++]);
    }
  }
  return out;
}

}  // namespace testgen
