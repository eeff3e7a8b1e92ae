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

#include "testgen/error.h"

namespace testgen {

namespace {

std::string describe(const std::vector<SchemaIssue>& issues) {
  std::string out = "manifest has " + std::to_string(issues.size()) +
                    " problem(s)";
  for (const SchemaIssue& issue : issues) {
    out += "\n  " + issue.field_path + ": " + issue.message;
  }
  return out;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnbalancedBraces: return "UnbalancedBraces";
    case ErrorCode::kNoClassFound: return "NoClassFound";
    case ErrorCode::kDuplicateTestName: return "DuplicateTestName";
    case ErrorCode::kNoParseableClass: return "NoParseableClass";
    case ErrorCode::kNameCollision: return "NameCollision";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kMissingClassUnderTest: return "MissingClassUnderTest";
    case ErrorCode::kProviderTimeout: return "ProviderTimeout";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kCassetteMiss: return "CassetteMiss";
    case ErrorCode::kArtifactMissing: return "ArtifactMissing";
    case ErrorCode::kArtifactMalformed: return "ArtifactMalformed";
    case ErrorCode::kInfraError: return "InfraError";
    case ErrorCode::kUnknownGroupField: return "UnknownGroupField";
    case ErrorCode::kPreconditionViolation: return "PreconditionViolation";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUsage: return "Usage";
  }
  return "Unknown";
}

bool is_infrastructure_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfraError:
    case ErrorCode::kArtifactMissing:
    case ErrorCode::kArtifactMalformed:
    case ErrorCode::kProviderTimeout:
    case ErrorCode::kProviderError:
    case ErrorCode::kCassetteMiss:
    case ErrorCode::kIoError:
      return true;
    default:
      return false;
  }
}

SchemaError::SchemaError(std::vector<SchemaIssue> issues)
    : Error(ErrorCode::kSchemaError, describe(issues)),
      issues_(std::move(issues)) {}

}  // namespace testgen
