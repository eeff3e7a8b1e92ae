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

// Splitting test-class sources into individual test cases and stitching
// extended classes back together.
//
// The reference grammar is a brace dialect modelled on Kotlin/JUnit:
//
//   class CalcTest {
//       @Test
//       fun testClamp() {
//           assertEquals(5, clamp(5, 0, 10))
//       }
//   }
//
// String literals (including raw strings and `${...}` templates), char
// literals and comments are skipped when matching braces.

#ifndef TESTGEN_DIALECT_H_
#define TESTGEN_DIALECT_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace testgen {

struct DialectConfig {
  std::string test_marker = "@Test";
  std::string class_keyword = "class";
  std::string function_keyword = "fun";
  // Identifiers that count as an assertion when used as a call.
  std::vector<std::string> assertion_tokens = {
      "assert",          "assertEquals",    "assertNotEquals",
      "assertTrue",      "assertFalse",     "assertNull",
      "assertNotNull",   "assertSame",      "assertNotSame",
      "assertThat",      "assertThrows",    "assertFailsWith",
      "assertContentEquals", "assertArrayEquals", "fail",
      "verify",          "expect"};
  std::string todo_token = "TODO";
};

struct TestCase {
  std::string name;
  // Annotation lines above the function, whitespace-trimmed.
  std::vector<std::string> annotation_lines;
  // Source text from the start of the function line (past indentation) to
  // the closing brace of its body, inclusive.
  std::string body_text;
  std::string normalized_body;

  // Where the case sits in the source it was parsed from. `begin` is the
  // start of its first annotation line; `end` is one past the closing brace.
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string indent;

  // Position and length of the name token (with backticks, if any) inside
  // body_text.
  std::size_t name_offset = 0;
  std::size_t name_length = 0;

  bool has_assertion = false;
  bool has_todo = false;
};

struct TestClassSource {
  std::string path;
  std::string raw_text;
  std::string class_name;
  // New tests go here: the start of the line holding the class's final
  // closing brace, or the brace itself when other text shares that line.
  std::size_t insertion_point = 0;
  std::vector<TestCase> test_cases;

  std::string_view header() const {
    return std::string_view(raw_text).substr(0, insertion_point);
  }
  std::string_view trailer() const {
    return std::string_view(raw_text).substr(insertion_point);
  }
  // Alternating non-test and test slices of raw_text; concatenating them
  // reproduces raw_text exactly.
  std::vector<std::string_view> segments() const;
  // Indentation used for class members (taken from the first test case).
  std::string member_indent() const;
};

// Lines trimmed, interior whitespace runs collapsed to one space, blank
// lines dropped.
std::string normalize_body(std::string_view body);

bool contains_assertion(std::string_view body, const DialectConfig& config);
bool contains_todo(std::string_view body, const DialectConfig& config);

// Replaces string, char-literal and comment contents with spaces, keeping
// newlines, so structural scans see only code. Offsets are preserved.
std::string mask_non_code(std::string_view source);

// Throws UnbalancedBraces, NoClassFound (Error) or DuplicateTestName.
TestClassSource parse_test_class(std::string_view source,
                                 const DialectConfig& config,
                                 std::string path = {});

// Every test in the model response that is not an unchanged copy of an
// original test (same name and same normalized body). Name clashes with the
// originals get a numeric suffix. Throws Error(kNoParseableClass).
std::vector<TestCase> extract_response_tests(const TestClassSource& original,
                                             std::string_view response,
                                             const DialectConfig& config);

// The subset of extract_response_tests whose normalized body differs from
// every original test.
std::vector<TestCase> extract_new_tests(const TestClassSource& original,
                                        std::string_view response,
                                        const DialectConfig& config);

// Original text with `accepted` inserted before the final closing brace,
// each preceded by a blank line. Throws Error(kNameCollision).
std::string reassemble(const TestClassSource& original,
                       std::span<const TestCase> accepted);

TestCase rename_test(const TestCase& test, const std::string& new_name);

}  // namespace testgen

#endif  // TESTGEN_DIALECT_H_
