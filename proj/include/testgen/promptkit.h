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

#ifndef TESTGEN_PROMPTKIT_H_
#define TESTGEN_PROMPTKIT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace testgen {

inline constexpr std::string_view kTestClassPlaceholder = "{existing_test_class}";
inline constexpr std::string_view kClassUnderTestPlaceholder = "{class_under_test}";

struct PromptTemplate {
  std::string name;
  std::string template_text;
  bool requires_class_under_test = false;
};

// extend_test, extend_coverage, corner_cases, statement_to_complete.
const std::vector<PromptTemplate>& builtin_templates();
const PromptTemplate* find_builtin_template(std::string_view name);
bool is_builtin_template(std::string_view name);

// A user template; requires_class_under_test follows from its placeholders.
// Throws Error(kSchemaError) for a reserved name or missing test-class
// placeholder.
PromptTemplate make_custom_template(std::string name, std::string text);

// Single-pass splice: placeholder-like text inside the arguments is left
// alone. Throws Error(kMissingClassUnderTest).
std::string render(const PromptTemplate& tmpl, std::string_view test_class,
                   const std::optional<std::string>& class_under_test);

}  // namespace testgen

#endif  // TESTGEN_PROMPTKIT_H_
