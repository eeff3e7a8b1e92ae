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

#ifndef TESTGEN_COVERAGE_H_
#define TESTGEN_COVERAGE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

namespace testgen {

using LineSet = std::set<int>;

// File -> covered line numbers. Files never map to an empty set.
struct CoverageMap {
  std::map<std::string, LineSet> entries;

  void add(const std::string& file, int line);
  void add(const std::string& file, const LineSet& lines);
  bool contains(const std::string& file, int line) const;
  std::size_t total_lines() const;
  bool empty() const { return entries.empty(); }

  friend bool operator==(const CoverageMap&, const CoverageMap&) = default;
};

inline constexpr double kIntegrationLikeThreshold = 0.8;

struct CoverageDelta {
  std::map<std::string, LineSet> newly_covered;
  std::set<std::string> new_files;
  std::set<std::string> extended_files;
  std::size_t total_new_lines = 0;
  std::size_t on_class_under_test = 0;
  // Absent when no class under test is known ("unclassified").
  std::optional<double> off_target_fraction;

  bool empty() const { return total_new_lines == 0; }
  bool integration_like(double threshold = kIntegrationLikeThreshold) const {
    return off_target_fraction && total_new_lines > 0 &&
           *off_target_fraction >= threshold;
  }

  friend bool operator==(const CoverageDelta&, const CoverageDelta&) = default;
};

CoverageMap coverage_union(std::span<const CoverageMap> maps);
CoverageMap coverage_union(const CoverageMap& a, const CoverageMap& b);

CoverageDelta coverage_delta(const CoverageMap& candidate,
                             const CoverageMap& baseline,
                             const std::optional<std::string>& class_under_test);

// Paths name the same file if one is a whole-component suffix of the other
// ("src/Calc.kt" and "/repo/src/Calc.kt").
bool same_source_file(std::string_view a, std::string_view b);

// "12-14, 20"
std::string format_line_ranges(const LineSet& lines);

nlohmann::json to_json(const CoverageMap& map);
CoverageMap coverage_map_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CoverageDelta& delta);
CoverageDelta coverage_delta_from_json(const nlohmann::json& j);

}  // namespace testgen

#endif  // TESTGEN_COVERAGE_H_
