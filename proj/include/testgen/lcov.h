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

// The LCOV subset read from coverage artifacts:
//
//   SF:<path>
//   DA:<line>,<hit_count>[,<checksum>]
//   end_of_record
//
// A line is covered iff hit_count > 0. Other record types are ignored.

#ifndef TESTGEN_LCOV_H_
#define TESTGEN_LCOV_H_

#include <string>
#include <string_view>

#include "testgen/coverage.h"

namespace testgen {

// Throws ArtifactMalformed with the 1-based line of the offending record.
CoverageMap parse_lcov(std::string_view text);

// Covered lines only, each with hit count 1.
std::string write_lcov(const CoverageMap& map);

}  // namespace testgen

#endif  // TESTGEN_LCOV_H_
