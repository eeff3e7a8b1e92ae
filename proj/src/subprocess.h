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

// Minimal /bin/sh runner with output capture, wall-clock timeout and
// process-group kill.

#ifndef TESTGEN_SRC_SUBPROCESS_H_
#define TESTGEN_SRC_SUBPROCESS_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace testgen::internal {

struct ProcessResult {
  int exit_code = -1;  // 128 + signal when killed by a signal
  bool timed_out = false;
  std::string out;  // first capture_limit bytes
  std::string err;
};

struct ProcessOptions {
  std::filesystem::path cwd;
  std::vector<std::pair<std::string, std::string>> env;  // added/overridden
  std::chrono::milliseconds timeout{300000};
  std::size_t capture_limit = 4096;
};

// Throws Error(kInfraError) when the process cannot be started at all.
ProcessResult run_shell(const std::string& command, const ProcessOptions& options);

}  // namespace testgen::internal

#endif  // TESTGEN_SRC_SUBPROCESS_H_
