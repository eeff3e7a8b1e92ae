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

// Brute-force reference computations used to check the library. Nothing
// here calls into the code paths it is used to verify.

#ifndef TESTGEN_TESTS_ORACLES_H_
#define TESTGEN_TESTS_ORACLES_H_

#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "testgen/coverage.h"

namespace testgen::oracles {

using Pairs = std::set<std::pair<std::string, int>>;

inline CoverageMap random_map(std::mt19937& rng, int max_files, int max_line) {
  CoverageMap m;
  std::uniform_int_distribution<int> files(0, max_files);
  std::uniform_int_distribution<int> lines(1, max_line);
  std::uniform_int_distribution<int> count(0, max_line / 2);
  int nfiles = files(rng);
  for (int f = 0; f < nfiles; ++f) {
    std::string name = "f" + std::to_string(files(rng)) + ".kt";
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
      m.entries[name].insert(lines(rng));
    }
    if (m.entries[name].empty()) m.entries.erase(name);
  }
  return m;
}

inline Pairs to_pairs(const CoverageMap& m) {
  Pairs out;
  for (const auto& [file, lines] : m.entries)
    for (int l : lines) out.emplace(file, l);
  return out;
}

inline Pairs union_pairs(const std::vector<CoverageMap>& maps) {
  Pairs out;
  for (const auto& m : maps) {
    Pairs p = to_pairs(m);
    out.insert(p.begin(), p.end());
  }
  return out;
}

inline Pairs difference_pairs(const CoverageMap& a, const CoverageMap& b) {
  Pairs pa = to_pairs(a), pb = to_pairs(b), out;
  for (const auto& p : pa)
    if (!pb.count(p)) out.insert(p);
  return out;
}

inline Pairs intersection_pairs(const CoverageMap& a, const CoverageMap& b) {
  Pairs pa = to_pairs(a), pb = to_pairs(b), out;
  for (const auto& p : pa)
    if (pb.count(p)) out.insert(p);
  return out;
}

inline Pairs delta_pairs(const CoverageDelta& d) {
  Pairs out;
  for (const auto& [file, lines] : d.newly_covered)
    for (int l : lines) out.emplace(file, l);
  return out;
}

// accepted[pair] = normalized bodies accepted by that (model, prompt) pair.
// Returns, per pair, the number of distinct bodies that no other pair
// accepted, by comparing every body against every other pair's bodies.
inline std::map<std::pair<std::string, std::string>, int> unique_counts(
    const std::map<std::pair<std::string, std::string>,
                   std::vector<std::string>>& accepted) {
  std::map<std::pair<std::string, std::string>, int> out;
  for (const auto& [pair, bodies] : accepted) {
    std::set<std::string> distinct(bodies.begin(), bodies.end());
    int unique = 0;
    for (const std::string& body : distinct) {
      bool shared = false;
      for (const auto& [other, other_bodies] : accepted) {
        if (other == pair) continue;
        for (const std::string& ob : other_bodies) {
          if (ob == body) shared = true;
        }
      }
      if (!shared) ++unique;
    }
    out[pair] = unique;
  }
  return out;
}

}  // namespace testgen::oracles

#endif  // TESTGEN_TESTS_ORACLES_H_
