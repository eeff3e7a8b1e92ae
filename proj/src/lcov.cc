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

#include "testgen/lcov.h"

#include <charconv>
#include <optional>

#include "testgen/error.h"

namespace testgen {

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

CoverageMap parse_lcov(std::string_view text) {
  CoverageMap map;
  std::optional<std::string> current;
  std::size_t current_line = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line.starts_with("SF:")) {
      if (current) throw ArtifactMalformed(line_no, "SF inside open record");
      std::string_view path = line.substr(3);
      if (path.empty()) throw ArtifactMalformed(line_no, "empty SF path");
      current = std::string(path);
      current_line = line_no;
    } else if (line.starts_with("DA:")) {
      if (!current) throw ArtifactMalformed(line_no, "DA outside SF record");
      std::string_view fields = line.substr(3);
      std::size_t comma = fields.find(',');
      if (comma == std::string_view::npos)
        throw ArtifactMalformed(line_no, "DA without hit count");
      std::string_view hits_field = fields.substr(comma + 1);
      std::size_t checksum = hits_field.find(',');
      if (checksum != std::string_view::npos)
        hits_field = hits_field.substr(0, checksum);
      auto number = parse_number<int>(fields.substr(0, comma));
      auto hits = parse_number<unsigned long long>(hits_field);
      if (!number || *number <= 0)
        throw ArtifactMalformed(line_no, "bad line number");
      if (!hits) throw ArtifactMalformed(line_no, "bad hit count");
      if (*hits > 0) map.add(*current, *number);
    } else if (line == "end_of_record") {
      if (!current)
        throw ArtifactMalformed(line_no, "end_of_record without SF");
      current.reset();
    }
  }
  if (current) throw ArtifactMalformed(current_line, "record not terminated");
  return map;
}

std::string write_lcov(const CoverageMap& map) {
  std::string out;
  for (const auto& [file, lines] : map.entries) {
    out += "SF:" + file + "\n";
    for (int line : lines) out += "DA:" + std::to_string(line) + ",1\n";
    out += "end_of_record\n";
  }
  return out;
}

}  // namespace testgen
