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

#include "testgen/llm_gateway.h"

#include <cmath>
#include <cstdio>
#include <thread>

#include "httplib.h"
#include "testgen/error.h"
#include "testgen/hashing.h"

namespace testgen {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

bool same_temperature(double a, double b) { return std::fabs(a - b) < 1e-9; }

nlohmann::json config_json(const LlmConfig& c) {
  return {{"model_id", c.model_id},
          {"temperature", c.temperature},
          {"samples_per_prompt", c.samples_per_prompt},
          {"max_tokens", c.max_tokens}};
}

}  // namespace

std::string_view provider_kind_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kHttp: return "http";
    case ProviderKind::kStub: return "stub";
    case ProviderKind::kReplay: return "replay";
  }
  return "stub";
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "http") return ProviderKind::kHttp;
  if (name == "stub") return ProviderKind::kStub;
  if (name == "replay") return ProviderKind::kReplay;
  throw Error(ErrorCode::kSchemaError,
              "unknown provider '" + std::string(name) + "'");
}

std::vector<LlmConfig> sweep_configs(const LlmConfig& base, bool sweep) {
  if (!sweep) return {base};
  std::vector<LlmConfig> out;
  for (int step = 0; step <= 10; ++step) {
    LlmConfig c = base;
    c.temperature = step / 10.0;
    out.push_back(c);
  }
  return out;
}

std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", t);
  return buf;
}

std::string deterministic_request_id(std::string_view prefix,
                                     const std::string& prompt,
                                     const LlmConfig& config) {
  std::string key = sha256_hex(prompt) + "|" + config.model_id + "|" +
                    format_temperature(config.temperature) + "|" +
                    std::to_string(config.samples_per_prompt);
  return std::string(prefix) + "-" + sha256_hex(key).substr(0, 16);
}

// --- stub ------------------------------------------------------------------

StubProvider StubProvider::from_json(const nlohmann::json& script) {
  const nlohmann::json& rules =
      script.is_array() ? script : script.at("rules");
  std::vector<StubRule> out;
  for (const auto& r : rules) {
    StubRule rule;
    std::string match = r.value("match", std::string("any"));
    if (match == "any") {
      rule.match = StubRule::Match::kAny;
    } else if (match == "exact") {
      rule.match = StubRule::Match::kExact;
    } else if (match == "contains") {
      rule.match = StubRule::Match::kContains;
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown stub matcher: " + match);
    }
    rule.prompt = r.value("prompt", std::string());
    if (r.contains("model")) rule.model_id = r.at("model").get<std::string>();
    if (r.contains("temperature"))
      rule.temperature = r.at("temperature").get<double>();
    rule.responses = r.at("responses").get<std::vector<std::string>>();
    out.push_back(std::move(rule));
  }
  return StubProvider(std::move(out));
}

StubProvider StubProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "stub script not found: " + path.string());
  }
  return from_json(nlohmann::json::parse(in));
}

GenerationResult StubProvider::generate(const std::string& prompt,
                                        const LlmConfig& config) {
  GenerationResult result;
  result.prompt_text = prompt;
  result.config = config;
  result.request_id = deterministic_request_id("stub", prompt, config);
  for (const StubRule& rule : rules_) {
    bool hit = false;
    switch (rule.match) {
      case StubRule::Match::kAny: hit = true; break;
      case StubRule::Match::kExact: hit = prompt == rule.prompt; break;
      case StubRule::Match::kContains:
        hit = prompt.find(rule.prompt) != std::string::npos;
        break;
    }
    if (hit && rule.model_id && *rule.model_id != config.model_id) hit = false;
    if (hit && rule.temperature &&
        !same_temperature(*rule.temperature, config.temperature))
      hit = false;
    if (!hit) continue;
    for (const std::string& r : rule.responses) {
      if (static_cast<int>(result.responses.size()) >= config.samples_per_prompt)
        break;
      result.responses.push_back(r);
    }
    break;
  }
  return result;
}

// --- cassette ----------------------------------------------------------------

nlohmann::json to_json(const CassetteRecord& record) {
  return {{"prompt_sha256", record.prompt_sha256},
          {"config", config_json(record.config)},
          {"responses", record.responses},
          {"request_id", record.request_id}};
}

CassetteRecord cassette_record_from_json(const nlohmann::json& j) {
  CassetteRecord r;
  r.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
  const auto& c = j.at("config");
  r.config.model_id = c.at("model_id").get<std::string>();
  r.config.temperature = c.at("temperature").get<double>();
  r.config.samples_per_prompt = c.value("samples_per_prompt", 1);
  r.config.max_tokens = c.value("max_tokens", 2048);
  r.config.provider = ProviderKind::kReplay;
  r.responses = j.at("responses").get<std::vector<std::string>>();
  r.request_id = j.value("request_id", std::string());
  return r;
}

ReplayProvider ReplayProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "cassette not found: " + path.string());
  }
  std::vector<CassetteRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(cassette_record_from_json(nlohmann::json::parse(line)));
  }
  return ReplayProvider(std::move(records));
}

GenerationResult ReplayProvider::generate(const std::string& prompt,
                                          const LlmConfig& config) {
  const std::string digest = sha256_hex(prompt);
  for (const CassetteRecord& r : records_) {
    if (r.prompt_sha256 != digest || r.config.model_id != config.model_id ||
        !same_temperature(r.config.temperature, config.temperature))
      continue;
    GenerationResult result;
    result.prompt_text = prompt;
    result.config = config;
    result.request_id = r.request_id.empty()
                            ? deterministic_request_id("replay", prompt, config)
                            : r.request_id;
    for (const std::string& text : r.responses) {
      if (static_cast<int>(result.responses.size()) >= config.samples_per_prompt)
        break;
      result.responses.push_back(text);
    }
    return result;
  }
  throw Error(ErrorCode::kCassetteMiss,
              "no cassette record for prompt " + digest.substr(0, 12) +
                  " model " + config.model_id + " temperature " +
                  format_temperature(config.temperature));
}

RecordingProvider::RecordingProvider(std::shared_ptr<LlmProvider> inner,
                                     std::filesystem::path cassette)
    : inner_(std::move(inner)), cassette_(std::move(cassette)) {}

GenerationResult RecordingProvider::generate(const std::string& prompt,
                                             const LlmConfig& config) {
  GenerationResult result = inner_->generate(prompt, config);
  CassetteRecord record{sha256_hex(prompt), config, result.responses,
                        result.request_id};
  std::string line = to_json(record).dump() + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(cassette_, std::ios::app | std::ios::binary);
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + cassette_.string());
  return result;
}

// --- http --------------------------------------------------------------------

HttpProvider::HttpProvider(HttpOptions options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorCode::kSchemaError, "endpoint needs a scheme: " + url);
  }
  std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) {
    base_ = url;
    path_ = "/v1/chat/completions";
  } else {
    base_ = url.substr(0, slash);
    path_ = url.substr(slash);
  }
}

nlohmann::json HttpProvider::request_body(const std::string& prompt,
                                          const LlmConfig& config) {
  return {{"model", config.model_id},
          {"messages", nlohmann::json::array(
                           {{{"role", "user"}, {"content", prompt}}})},
          {"temperature", config.temperature},
          {"n", config.samples_per_prompt},
          {"max_tokens", config.max_tokens}};
}

GenerationResult HttpProvider::generate(const std::string& prompt,
                                        const LlmConfig& config) {
  const std::string body = request_body(prompt, config).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  const auto start = Clock::now();
  auto backoff = options_.initial_backoff;
  int last_status = 0;
  std::string last_body;
  bool last_was_transport = false;
  for (int attempt = 1; attempt <= std::max(1, options_.max_attempts); ++attempt) {
    httplib::Client client(base_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_was_transport = true;
      last_body = httplib::to_string(res.error());
    } else if (res->status == 200) {
      nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
      if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array()) {
        throw ProviderError(res->status, res->body);
      }
      GenerationResult result;
      result.prompt_text = prompt;
      result.config = config;
      result.latency_ms = elapsed_ms(start);
      result.request_id = j.value("id", std::string());
      if (result.request_id.empty()) {
        result.request_id = deterministic_request_id("http", prompt, config);
      }
      for (const auto& choice : j["choices"]) {
        if (static_cast<int>(result.responses.size()) >= config.samples_per_prompt)
          break;
        const auto& content = choice.value("message", nlohmann::json::object())
                                  .value("content", nlohmann::json());
        if (content.is_string()) result.responses.push_back(content.get<std::string>());
      }
      return result;
    } else {
      last_was_transport = false;
      last_status = res->status;
      last_body = res->body;
      bool retryable = res->status == 429 || res->status >= 500;
      if (!retryable) throw ProviderError(res->status, res->body);
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  if (last_was_transport) {
    throw Error(ErrorCode::kProviderTimeout,
                "provider unreachable after " +
                    std::to_string(options_.max_attempts) +
                    " attempts: " + last_body);
  }
  throw ProviderError(last_status, last_body);
}

}  // namespace testgen
