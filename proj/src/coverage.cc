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

#include "testgen/coverage.h"

#include <algorithm>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace testgen {

void CoverageMap::add(const std::string& file, int line) {
  if (line <= 0) throw std::invalid_argument("line numbers must be positive");
  entries[file].insert(line);
}

void CoverageMap::add(const std::string& file, const LineSet& lines) {
  if (lines.empty()) return;
  if (*lines.begin() <= 0)
    throw std::invalid_argument("line numbers must be positive");
  entries[file].insert(lines.begin(), lines.end());
}

bool CoverageMap::contains(const std::string& file, int line) const {
  auto it = entries.find(file);
  return it != entries.end() && it->second.count(line) > 0;
}

std::size_t CoverageMap::total_lines() const {
  std::size_t n = 0;
  for (const auto& [file, lines] : entries) n += lines.size();
  return n;
}

CoverageMap coverage_union(std::span<const CoverageMap> maps) {
  CoverageMap out;
  for (const CoverageMap& m : maps) {
    for (const auto& [file, lines] : m.entries) out.add(file, lines);
  }
  return out;
}

CoverageMap coverage_union(const CoverageMap& a, const CoverageMap& b) {
  CoverageMap out = a;
  for (const auto& [file, lines] : b.entries) out.add(file, lines);
  return out;
}

CoverageDelta coverage_delta(
    const CoverageMap& candidate, const CoverageMap& baseline,
    const std::optional<std::string>& class_under_test) {
  CoverageDelta delta;
  for (const auto& [file, lines] : candidate.entries) {
    auto base = baseline.entries.find(file);
    LineSet fresh;
    if (base == baseline.entries.end()) {
      fresh = lines;
    } else {
      std::set_difference(lines.begin(), lines.end(), base->second.begin(),
                          base->second.end(),
                          std::inserter(fresh, fresh.end()));
    }
    if (fresh.empty()) continue;
    if (base == baseline.entries.end()) {
      delta.new_files.insert(file);
    } else {
      delta.extended_files.insert(file);
    }
    delta.total_new_lines += fresh.size();
    if (class_under_test && same_source_file(file, *class_under_test)) {
      delta.on_class_under_test += fresh.size();
    }
    delta.newly_covered.emplace(file, std::move(fresh));
  }
  if (class_under_test) {
    delta.off_target_fraction =
        delta.total_new_lines == 0
            ? 0.0
            : 1.0 - static_cast<double>(delta.on_class_under_test) /
                        static_cast<double>(delta.total_new_lines);
  }
  return delta;
}

bool same_source_file(std::string_view a, std::string_view b) {
  namespace fs = std::filesystem;
  std::vector<std::string> pa, pb;
  for (const auto& part : fs::path(a).lexically_normal()) {
    if (!part.empty() && part != "/" && part != ".") pa.push_back(part.string());
  }
  for (const auto& part : fs::path(b).lexically_normal()) {
    if (!part.empty() && part != "/" && part != ".") pb.push_back(part.string());
  }
  if (pa.empty() || pb.empty()) return false;
  if (pa.size() > pb.size()) std::swap(pa, pb);
  return std::equal(pa.rbegin(), pa.rend(), pb.rbegin());
}

std::string format_line_ranges(const LineSet& lines) {
  std::string out;
  auto it = lines.begin();
  while (it != lines.end()) {
    int first = *it;
    int last = first;
    ++it;
    while (it != lines.end() && *it == last + 1) {
      last = *it;
      ++it;
    }
    if (!out.empty()) out += ", ";
    out += std::to_string(first);
    if (last != first) out += "-" + std::to_string(last);
  }
  return out;
}

nlohmann::json to_json(const CoverageMap& map) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [file, lines] : map.entries) j[file] = lines;
  return j;
}

CoverageMap coverage_map_from_json(const nlohmann::json& j) {
  CoverageMap out;
  for (const auto& [file, lines] : j.items()) {
    for (int line : lines.get<std::vector<int>>()) out.add(file, line);
  }
  return out;
}

nlohmann::json to_json(const CoverageDelta& delta) {
  nlohmann::json newly = nlohmann::json::object();
  for (const auto& [file, lines] : delta.newly_covered) newly[file] = lines;
  nlohmann::json j{
      {"newly_covered", newly},
      {"new_files", delta.new_files},
      {"extended_files", delta.extended_files},
      {"total_new_lines", delta.total_new_lines},
      {"on_class_under_test", delta.on_class_under_test},
  };
  if (delta.off_target_fraction) {
    j["off_target_fraction"] = *delta.off_target_fraction;
  } else {
    j["off_target_fraction"] = "unclassified";
  }
  return j;
}

CoverageDelta coverage_delta_from_json(const nlohmann::json& j) {
  CoverageDelta delta;
  for (const auto& [file, lines] : j.at("newly_covered").items()) {
    delta.newly_covered[file] = lines.get<LineSet>();
  }
  delta.new_files = j.at("new_files").get<std::set<std::string>>();
  delta.extended_files = j.at("extended_files").get<std::set<std::string>>();
  delta.total_new_lines = j.at("total_new_lines").get<std::size_t>();
  delta.on_class_under_test = j.at("on_class_under_test").get<std::size_t>();
  const auto& off = j.at("off_target_fraction");
  if (off.is_number()) delta.off_target_fraction = off.get<double>();
  return delta;
}

}  // namespace testgen
