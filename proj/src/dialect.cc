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

#include "testgen/dialect.h"

#include <algorithm>
#include <optional>
#include <set>
#include <unordered_set>

#include "testgen/error.h"

namespace testgen {

namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), is_space);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::size_t line_start(std::string_view text, std::size_t pos) {
  while (pos > 0 && text[pos - 1] != '\n') --pos;
  return pos;
}

std::size_t line_end(std::string_view text, std::size_t pos) {
  while (pos < text.size() && text[pos] != '\n') ++pos;
  return pos;
}

// True when `word` occurs at `pos` delimited by non-identifier characters.
bool word_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (word.empty() || text.substr(pos, word.size()) != word) return false;
  if (pos > 0 && is_ident_char(text[pos - 1])) return false;
  std::size_t after = pos + word.size();
  return after >= text.size() || !is_ident_char(text[after]);
}

std::size_t skip_spaces(std::string_view text, std::size_t pos) {
  while (pos < text.size() && is_space(text[pos])) ++pos;
  return pos;
}

// Identifier or `backticked name` at pos. Returns token length, 0 if none.
std::size_t identifier_at(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  if (text[pos] == '`') {
    std::size_t close = text.find('`', pos + 1);
    if (close == std::string_view::npos) return 0;
    if (text.substr(pos + 1, close - pos - 1).find('\n') !=
        std::string_view::npos)
      return 0;
    return close > pos + 1 ? close - pos + 1 : 0;
  }
  if (!is_ident_char(text[pos]) || (text[pos] >= '0' && text[pos] <= '9'))
    return 0;
  std::size_t end = pos;
  while (end < text.size() && is_ident_char(text[end])) ++end;
  return end - pos;
}

std::string strip_backticks(std::string_view token) {
  if (token.size() >= 2 && token.front() == '`' && token.back() == '`')
    return std::string(token.substr(1, token.size() - 2));
  return std::string(token);
}

// Brace structure of masked text.
struct BraceIndex {
  std::vector<int> depth;  // depth before each character
  std::vector<std::size_t> match;  // for '{' positions: matching '}'
};

BraceIndex index_braces(std::string_view masked) {
  BraceIndex index;
  index.depth.resize(masked.size() + 1);
  index.match.assign(masked.size(), std::string_view::npos);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    index.depth[i] = static_cast<int>(open.size());
    if (masked[i] == '{') {
      open.push_back(i);
    } else if (masked[i] == '}') {
      if (open.empty()) throw UnbalancedBraces(i);
      index.match[open.back()] = i;
      open.pop_back();
    }
  }
  index.depth[masked.size()] = static_cast<int>(open.size());
  if (!open.empty()) throw UnbalancedBraces(open.front());
  return index;
}

// From `pos` (just past a declaration name), finds the '{' opening its body:
// skips balanced parentheses and angle-free type text. Stops at '}', ';' or
// end of input.
std::optional<std::size_t> find_body_open(std::string_view masked,
                                          std::size_t pos,
                                          bool allow_equals) {
  int parens = 0;
  for (std::size_t i = pos; i < masked.size(); ++i) {
    char c = masked[i];
    if (c == '(') {
      ++parens;
    } else if (c == ')') {
      if (--parens < 0) return std::nullopt;
    } else if (parens == 0) {
      if (c == '{') return i;
      if (c == '}' || c == ';') return std::nullopt;
      if (c == '=' && !allow_equals) return std::nullopt;
    }
  }
  return std::nullopt;
}

struct ClassDecl {
  std::size_t keyword = 0;
  std::string name;
  std::size_t open = 0;
  std::size_t close = 0;
};

std::vector<ClassDecl> find_top_level_classes(std::string_view masked,
                                              const BraceIndex& braces,
                                              const DialectConfig& config) {
  std::vector<ClassDecl> decls;
  const std::string& kw = config.class_keyword;
  for (std::size_t pos = masked.find(kw); pos != std::string_view::npos;
       pos = masked.find(kw, pos + 1)) {
    if (braces.depth[pos] != 0 || !word_at(masked, pos, kw)) continue;
    // `Foo::class` and `x.class` are expressions, not declarations.
    if (pos > 0 && (masked[pos - 1] == ':' || masked[pos - 1] == '.'))
      continue;
    std::size_t name_pos = skip_spaces(masked, pos + kw.size());
    if (name_pos == pos + kw.size()) continue;
    std::size_t name_len = identifier_at(masked, name_pos);
    if (name_len == 0) continue;
    auto open = find_body_open(masked, name_pos + name_len, false);
    if (!open) continue;
    ClassDecl decl;
    decl.keyword = pos;
    decl.name = strip_backticks(masked.substr(name_pos, name_len));
    decl.open = *open;
    decl.close = braces.match[*open];
    // A later declaration with the same body replaces an earlier one; prose
    // such as "the test class that ..." can precede the real header.
    if (!decls.empty() && decls.back().open == decl.open) {
      decls.back() = decl;
    } else {
      decls.push_back(decl);
    }
  }
  return decls;
}

bool annotation_has_marker(std::string_view line, std::string_view marker) {
  for (std::size_t pos = line.find(marker); pos != std::string_view::npos;
       pos = line.find(marker, pos + 1)) {
    std::size_t after = pos + marker.size();
    bool boundary_before = pos == 0 || !is_ident_char(line[pos - 1]);
    bool boundary_after = after >= line.size() || !is_ident_char(line[after]);
    if (boundary_before && boundary_after) return true;
  }
  return false;
}

// One or more annotations (`@Name`, `@a.b.Name(args)`, `@get:Rule`) and
// nothing else.
bool is_annotation_only(std::string_view line) {
  std::size_t i = 0;
  if (line.empty()) return false;
  while (i < line.size()) {
    if (line[i] != '@') return false;
    ++i;
    std::size_t start = i;
    while (i < line.size() &&
           (is_ident_char(line[i]) || line[i] == '.' || line[i] == ':'))
      ++i;
    if (i == start) return false;
    if (i < line.size() && line[i] == '(') {
      int depth = 0;
      for (; i < line.size(); ++i) {
        if (line[i] == '(') ++depth;
        if (line[i] == ')' && --depth == 0) break;
      }
      if (i == line.size()) return false;
      ++i;
    }
    i = skip_spaces(line, i);
  }
  return true;
}

struct ParseOptions {
  bool allow_duplicate_names = false;
};

std::vector<TestCase> parse_tests_in_class(std::string_view source,
                                           std::string_view masked,
                                           const BraceIndex& braces,
                                           const ClassDecl& decl,
                                           const DialectConfig& config) {
  std::vector<TestCase> tests;
  const std::string& kw = config.function_keyword;
  const int member_depth = braces.depth[decl.open] + 1;
  std::size_t pos = decl.open + 1;
  while (true) {
    pos = masked.find(kw, pos);
    if (pos == std::string_view::npos || pos >= decl.close) break;
    if (braces.depth[pos] != member_depth || !word_at(masked, pos, kw)) {
      pos += kw.size();
      continue;
    }
    std::size_t name_pos = skip_spaces(masked, pos + kw.size());
    std::size_t name_len = identifier_at(masked, name_pos);
    std::size_t paren = skip_spaces(masked, name_pos + name_len);
    if (name_len == 0 || paren >= masked.size() || masked[paren] != '(') {
      pos += kw.size();
      continue;
    }
    auto open = find_body_open(masked, paren, true);
    if (!open || *open > decl.close) {
      pos += kw.size();
      continue;
    }
    std::size_t fn_end = braces.match[*open] + 1;

    // Annotations: the inline prefix on the function line plus the run of
    // '@' lines directly above it (blank lines skipped).
    std::size_t fn_line = line_start(source, pos);
    std::size_t first_code = skip_spaces(masked, fn_line);
    std::string_view inline_prefix = masked.substr(first_code, pos - first_code);
    bool marked = annotation_has_marker(inline_prefix, config.test_marker);

    std::vector<std::string> annotations;
    std::size_t begin = fn_line;
    std::size_t cursor = fn_line;
    while (cursor > decl.open + 1) {
      std::size_t prev_start = line_start(source, cursor - 1);
      if (prev_start <= decl.open) break;
      std::string_view code_line =
          trim(masked.substr(prev_start, cursor - 1 - prev_start));
      if (code_line.empty()) {
        cursor = prev_start;
        continue;
      }
      if (!is_annotation_only(code_line)) break;
      annotations.insert(
          annotations.begin(),
          std::string(trim(source.substr(prev_start, cursor - 1 - prev_start))));
      if (annotation_has_marker(code_line, config.test_marker)) marked = true;
      begin = prev_start;
      cursor = prev_start;
    }

    if (marked) {
      TestCase test;
      test.name = strip_backticks(masked.substr(name_pos, name_len));
      test.annotation_lines = std::move(annotations);
      test.begin = begin;
      test.end = fn_end;
      test.indent = std::string(source.substr(fn_line, first_code - fn_line));
      test.body_text = std::string(source.substr(first_code, fn_end - first_code));
      test.name_offset = name_pos - first_code;
      test.name_length = name_len;
      test.normalized_body =
          normalize_body(source.substr(name_pos + name_len,
                                       fn_end - name_pos - name_len));
      test.has_assertion = contains_assertion(test.body_text, config);
      test.has_todo = contains_todo(test.body_text, config);
      tests.push_back(std::move(test));
    }
    pos = fn_end;
  }
  return tests;
}

std::size_t compute_insertion_point(std::string_view source,
                                    std::size_t close) {
  std::size_t start = line_start(source, close);
  if (is_blank(source.substr(start, close - start))) return start;
  return close;
}

TestClassSource parse_impl(std::string_view source,
                           const DialectConfig& config, std::string path,
                           const ParseOptions& options) {
  const std::string masked = mask_non_code(source);
  const BraceIndex braces = index_braces(masked);
  std::vector<ClassDecl> decls = find_top_level_classes(masked, braces, config);
  if (decls.empty()) throw Error(ErrorCode::kNoClassFound, "no class found");

  // Prefer the class holding the most tests, then the largest body.
  const ClassDecl* best = nullptr;
  std::vector<TestCase> best_tests;
  for (const ClassDecl& decl : decls) {
    auto tests = parse_tests_in_class(source, masked, braces, decl, config);
    bool better = best == nullptr || tests.size() > best_tests.size() ||
                  (tests.size() == best_tests.size() &&
                   decl.close - decl.open > best->close - best->open);
    if (better) {
      best = &decl;
      best_tests = std::move(tests);
    }
  }

  if (!options.allow_duplicate_names) {
    std::set<std::string> seen;
    for (const TestCase& t : best_tests) {
      if (!seen.insert(t.name).second) throw DuplicateTestName(t.name);
    }
  }

  TestClassSource result;
  result.path = std::move(path);
  result.raw_text = std::string(source);
  result.class_name = best->name;
  result.insertion_point = compute_insertion_point(source, best->close);
  result.test_cases = std::move(best_tests);
  return result;
}

// Fenced code blocks (``` lines), longest first.
std::vector<std::string_view> fenced_blocks(std::string_view text) {
  std::vector<std::string_view> blocks;
  std::optional<std::size_t> content_start;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = line_end(text, pos);
    std::string_view line = trim(text.substr(pos, end - pos));
    if (line.substr(0, 3) == "```") {
      if (content_start) {
        blocks.push_back(text.substr(*content_start, pos - *content_start));
        content_start.reset();
      } else {
        content_start = std::min(end + 1, text.size());
      }
    }
    pos = end + 1;
  }
  if (content_start) blocks.push_back(text.substr(*content_start));
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](std::string_view a, std::string_view b) {
                     return a.size() > b.size();
                   });
  return blocks;
}

}  // namespace

std::vector<std::string_view> TestClassSource::segments() const {
  std::vector<std::string_view> out;
  std::string_view raw(raw_text);
  std::size_t cursor = 0;
  for (const TestCase& t : test_cases) {
    out.push_back(raw.substr(cursor, t.begin - cursor));
    out.push_back(raw.substr(t.begin, t.end - t.begin));
    cursor = t.end;
  }
  out.push_back(raw.substr(cursor));
  return out;
}

std::string TestClassSource::member_indent() const {
  if (!test_cases.empty()) return test_cases.front().indent;
  return "    ";
}

std::string normalize_body(std::string_view body) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = trim(body.substr(pos, end - pos));
    if (!line.empty()) {
      if (!out.empty()) out.push_back('\n');
      bool in_space = false;
      for (char c : line) {
        if (is_space(c)) {
          in_space = true;
          continue;
        }
        if (in_space) out.push_back(' ');
        in_space = false;
        out.push_back(c);
      }
    }
    pos = end + 1;
  }
  return out;
}

std::string mask_non_code(std::string_view src) {
  std::string out(src);
  enum class Kind { kCode, kString, kRawString };
  struct Frame {
    Kind kind;
    int depth;  // brace depth inside a ${...} template
  };
  std::vector<Frame> stack{{Kind::kCode, 0}};
  auto blank = [&](std::size_t i) {
    if (out[i] != '\n') out[i] = ' ';
  };
  // Only the outermost code frame is left visible.
  auto visible = [&] { return stack.size() == 1; };

  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    Frame& top = stack.back();
    char c = src[i];
    if (top.kind == Kind::kCode) {
      if (c == '/' && i + 1 < n && src[i + 1] == '/') {
        std::size_t end = line_end(src, i);
        for (std::size_t k = i; k < end; ++k) blank(k);
        i = end;
        continue;
      }
      if (c == '/' && i + 1 < n && src[i + 1] == '*') {
        int nesting = 0;
        std::size_t k = i;
        while (k < n) {
          if (src[k] == '/' && k + 1 < n && src[k + 1] == '*') {
            ++nesting;
            blank(k);
            blank(k + 1);
            k += 2;
          } else if (src[k] == '*' && k + 1 < n && src[k + 1] == '/') {
            --nesting;
            blank(k);
            blank(k + 1);
            k += 2;
            if (nesting == 0) break;
          } else {
            blank(k);
            ++k;
          }
        }
        i = k;
        continue;
      }
      if (src.substr(i, 3) == "\"\"\"") {
        for (std::size_t k = i; k < i + 3; ++k) blank(k);
        stack.push_back({Kind::kRawString, 0});
        i += 3;
        continue;
      }
      if (c == '"') {
        blank(i);
        stack.push_back({Kind::kString, 0});
        ++i;
        continue;
      }
      if (c == '\'') {
        // Char literal only if it closes within a short span on this line;
        // otherwise it is an apostrophe in surrounding prose.
        std::size_t limit = std::min(n, i + 10);
        std::size_t k = i + 1;
        if (k < limit && src[k] == '\\') k += 2; else ++k;
        while (k < limit && src[k] != '\'' && src[k] != '\n') ++k;
        if (k < limit && src[k] == '\'' && k > i + 1) {
          for (std::size_t m = i; m <= k; ++m) blank(m);
          i = k + 1;
          continue;
        }
      }
      if (stack.size() > 1) {
        if (c == '{') {
          ++top.depth;
        } else if (c == '}') {
          if (top.depth == 0) {
            blank(i);
            stack.pop_back();
            ++i;
            continue;
          }
          --top.depth;
        }
      }
      if (!visible()) blank(i);
      ++i;
      continue;
    }

    if (top.kind == Kind::kString) {
      if (c == '\\' && i + 1 < n) {
        blank(i);
        if (src[i + 1] != '\n') blank(i + 1);
        i += 2;
        continue;
      }
      if (c == '"' || c == '\n') {
        blank(i);
        stack.pop_back();
        ++i;
        continue;
      }
    } else {
      if (src.substr(i, 3) == "\"\"\"") {
        std::size_t k = i;
        while (k < n && src[k] == '"') ++k;  // trailing quotes belong inside
        for (std::size_t m = i; m < k; ++m) blank(m);
        stack.pop_back();
        i = k;
        continue;
      }
    }
    if (c == '$' && i + 1 < n && src[i + 1] == '{') {
      blank(i);
      blank(i + 1);
      stack.push_back({Kind::kCode, 0});
      i += 2;
      continue;
    }
    blank(i);
    ++i;
  }
  return out;
}

bool contains_assertion(std::string_view body, const DialectConfig& config) {
  const std::string masked = mask_non_code(body);
  std::unordered_set<std::string_view> tokens(config.assertion_tokens.begin(),
                                              config.assertion_tokens.end());
  std::string_view view(masked);
  std::size_t i = 0;
  while (i < view.size()) {
    if (!is_ident_char(view[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < view.size() && is_ident_char(view[end])) ++end;
    if (tokens.count(view.substr(i, end - i))) {
      std::size_t next = skip_spaces(view, end);
      if (next < view.size() &&
          (view[next] == '(' || view[next] == '{' || view[next] == '<'))
        return true;
    }
    i = end;
  }
  return false;
}

bool contains_todo(std::string_view body, const DialectConfig& config) {
  const std::string& token = config.todo_token;
  for (std::size_t pos = body.find(token); pos != std::string_view::npos;
       pos = body.find(token, pos + 1)) {
    if (word_at(body, pos, token)) return true;
  }
  return false;
}

TestClassSource parse_test_class(std::string_view source,
                                 const DialectConfig& config,
                                 std::string path) {
  return parse_impl(source, config, std::move(path), ParseOptions{});
}

TestCase rename_test(const TestCase& test, const std::string& new_name) {
  TestCase out = test;
  std::string_view token(test.body_text.data() + test.name_offset,
                         test.name_length);
  bool backticked = !token.empty() && token.front() == '`';
  std::string replacement = backticked ? "`" + new_name + "`" : new_name;
  out.body_text.replace(test.name_offset, test.name_length, replacement);
  out.name = new_name;
  out.name_length = replacement.size();
  return out;
}

std::vector<TestCase> extract_response_tests(const TestClassSource& original,
                                             std::string_view response,
                                             const DialectConfig& config) {
  std::vector<std::string_view> attempts = fenced_blocks(response);
  if (attempts.size() > 1) attempts.resize(1);
  attempts.push_back(response);

  std::optional<TestClassSource> parsed;
  ParseOptions lenient{.allow_duplicate_names = true};
  for (std::string_view attempt : attempts) {
    try {
      parsed = parse_impl(attempt, config, {}, lenient);
      break;
    } catch (const Error&) {
    }
  }
  if (!parsed) {
    throw Error(ErrorCode::kNoParseableClass,
                "response contains no parseable class");
  }

  std::set<std::string> taken;
  for (const TestCase& t : original.test_cases) taken.insert(t.name);

  std::vector<TestCase> out;
  for (const TestCase& t : parsed->test_cases) {
    bool echoed = std::any_of(
        original.test_cases.begin(), original.test_cases.end(),
        [&](const TestCase& o) {
          return o.name == t.name && o.normalized_body == t.normalized_body;
        });
    if (echoed) continue;
    if (taken.count(t.name) == 0) {
      taken.insert(t.name);
      out.push_back(t);
      continue;
    }
    for (int suffix = 2;; ++suffix) {
      std::string candidate = t.name + "_" + std::to_string(suffix);
      if (taken.insert(candidate).second) {
        out.push_back(rename_test(t, candidate));
        break;
      }
    }
  }
  return out;
}

std::vector<TestCase> extract_new_tests(const TestClassSource& original,
                                        std::string_view response,
                                        const DialectConfig& config) {
  std::set<std::string> bodies;
  for (const TestCase& t : original.test_cases) bodies.insert(t.normalized_body);
  std::vector<TestCase> out;
  for (TestCase& t : extract_response_tests(original, response, config)) {
    if (!bodies.count(t.normalized_body)) out.push_back(std::move(t));
  }
  return out;
}

std::string reassemble(const TestClassSource& original,
                       std::span<const TestCase> accepted) {
  std::set<std::string> names;
  for (const TestCase& t : original.test_cases) names.insert(t.name);
  for (const TestCase& t : accepted) {
    if (!names.insert(t.name).second) {
      throw Error(ErrorCode::kNameCollision, "test name collision: " + t.name);
    }
  }
  if (accepted.empty()) return original.raw_text;

  const std::string indent = original.member_indent();
  std::string_view head = original.header();
  std::string out(head);
  if (!head.empty() && head.back() != '\n') out.push_back('\n');
  for (const TestCase& t : accepted) {
    out.push_back('\n');
    for (const std::string& line : t.annotation_lines) {
      out += indent;
      out += line;
      out.push_back('\n');
    }
    out += indent;
    out += t.body_text;
    out.push_back('\n');
  }
  out += original.trailer();
  return out;
}

}  // namespace testgen
