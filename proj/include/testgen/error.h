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

#ifndef TESTGEN_ERROR_H_
#define TESTGEN_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace testgen {

enum class ErrorCode {
  kUnbalancedBraces,
  kNoClassFound,
  kDuplicateTestName,
  kNoParseableClass,
  kNameCollision,
  kSchemaError,
  kMissingFile,
  kMissingClassUnderTest,
  kProviderTimeout,
  kProviderError,
  kCassetteMiss,
  kArtifactMissing,
  kArtifactMalformed,
  kInfraError,
  kUnknownGroupField,
  kPreconditionViolation,
  kIoError,
  kUsage,
};

std::string_view error_code_name(ErrorCode code);

// Failures of the environment (tools, provider, files) rather than of a
// candidate.
bool is_infrastructure_error(ErrorCode code);

// Base for every error the library raises. The code is stable and is what
// the C API maps onto its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class UnbalancedBraces : public Error {
 public:
  explicit UnbalancedBraces(std::size_t position)
      : Error(ErrorCode::kUnbalancedBraces,
              "unbalanced braces at offset " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class DuplicateTestName : public Error {
 public:
  explicit DuplicateTestName(std::string name)
      : Error(ErrorCode::kDuplicateTestName, "duplicate test name: " + name),
        name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

struct SchemaIssue {
  std::string field_path;
  std::string message;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<SchemaIssue> issues);
  const std::vector<SchemaIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<SchemaIssue> issues_;
};

class ProviderError : public Error {
 public:
  ProviderError(int status, std::string body)
      : Error(ErrorCode::kProviderError,
              "provider returned status " + std::to_string(status)),
        status_(status),
        body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class ArtifactMalformed : public Error {
 public:
  ArtifactMalformed(std::size_t line, const std::string& what)
      : Error(ErrorCode::kArtifactMalformed,
              "malformed coverage artifact at line " + std::to_string(line) +
                  ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace testgen

#endif  // TESTGEN_ERROR_H_
