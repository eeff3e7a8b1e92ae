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

// Candidate generation. Three providers share one interface:
//
//   * HttpProvider   - OpenAI-compatible chat-completions endpoint
//   * StubProvider   - scripted responses, for tests and funnel fixtures
//   * ReplayProvider - answers from a recorded cassette, no network
//
// RecordingProvider wraps any of them and appends every call to a cassette
// (JSON Lines: prompt_sha256, config, responses[]).

#ifndef TESTGEN_LLM_GATEWAY_H_
#define TESTGEN_LLM_GATEWAY_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace testgen {

enum class ProviderKind { kHttp, kStub, kReplay };

std::string_view provider_kind_name(ProviderKind kind);
ProviderKind parse_provider_kind(std::string_view name);

struct LlmConfig {
  std::string model_id = "default";
  double temperature = 0.0;
  int samples_per_prompt = 1;
  int max_tokens = 2048;
  ProviderKind provider = ProviderKind::kStub;
};

struct GenerationResult {
  std::string prompt_text;
  std::vector<std::string> responses;
  LlmConfig config;
  std::int64_t latency_ms = 0;
  std::string request_id;
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual GenerationResult generate(const std::string& prompt,
                                    const LlmConfig& config) = 0;
};

// sweep=false -> {base}; sweep=true -> eleven copies of base at
// temperatures 0.0, 0.1, ..., 1.0.
std::vector<LlmConfig> sweep_configs(const LlmConfig& base, bool sweep);

// Temperatures print with one decimal ("0.0", "0.4").
std::string format_temperature(double t);

// Stable id for a (prompt, config) pair; used by stub and replay providers.
std::string deterministic_request_id(std::string_view prefix,
                                     const std::string& prompt,
                                     const LlmConfig& config);

// ---------------------------------------------------------------------------

struct StubRule {
  enum class Match { kAny, kExact, kContains };
  Match match = Match::kAny;
  std::string prompt;
  std::optional<std::string> model_id;
  std::optional<double> temperature;
  std::vector<std::string> responses;
};

// The first rule whose matchers all accept the call supplies up to
// samples_per_prompt responses. No matching rule -> empty response list.
class StubProvider : public LlmProvider {
 public:
  explicit StubProvider(std::vector<StubRule> rules) : rules_(std::move(rules)) {}

  // {"rules": [{"match": "any"|"exact"|"contains", "prompt": ..., "model":
  //  ..., "temperature": ..., "responses": [...]}, ...]} or a bare array.
  static StubProvider from_json(const nlohmann::json& script);
  static StubProvider from_file(const std::filesystem::path& path);

  GenerationResult generate(const std::string& prompt,
                            const LlmConfig& config) override;

 private:
  std::vector<StubRule> rules_;
};

// ---------------------------------------------------------------------------

struct CassetteRecord {
  std::string prompt_sha256;
  LlmConfig config;
  std::vector<std::string> responses;
  std::string request_id;
};

nlohmann::json to_json(const CassetteRecord& record);
CassetteRecord cassette_record_from_json(const nlohmann::json& j);

// Lookup keyed by prompt hash, model id and temperature; the first matching
// record wins. Read-only after construction.
class ReplayProvider : public LlmProvider {
 public:
  explicit ReplayProvider(std::vector<CassetteRecord> records)
      : records_(std::move(records)) {}
  static ReplayProvider from_file(const std::filesystem::path& path);

  // Throws Error(kCassetteMiss).
  GenerationResult generate(const std::string& prompt,
                            const LlmConfig& config) override;

 private:
  std::vector<CassetteRecord> records_;
};

class RecordingProvider : public LlmProvider {
 public:
  RecordingProvider(std::shared_ptr<LlmProvider> inner,
                    std::filesystem::path cassette);

  GenerationResult generate(const std::string& prompt,
                            const LlmConfig& config) override;

 private:
  std::shared_ptr<LlmProvider> inner_;
  std::filesystem::path cassette_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------

struct HttpOptions {
  // Full URL of the chat-completions route, e.g.
  // "https://api.example.com/v1/chat/completions".
  std::string endpoint;
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{60000};
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
};

// Retries transport failures, 429 and 5xx with exponential backoff. After
// max_attempts: ProviderTimeout for transport failures, ProviderError for
// HTTP statuses. Other 4xx statuses fail immediately.
class HttpProvider : public LlmProvider {
 public:
  explicit HttpProvider(HttpOptions options);

  GenerationResult generate(const std::string& prompt,
                            const LlmConfig& config) override;

  static nlohmann::json request_body(const std::string& prompt,
                                     const LlmConfig& config);

 private:
  HttpOptions options_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace testgen

#endif  // TESTGEN_LLM_GATEWAY_H_
