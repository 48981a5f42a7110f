// Copyright 2026 The Critique Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <semaphore>
#include <string>
#include <vector>

#include "critique_forge/types.hpp"
#include "json.hpp"

namespace critique_forge {

enum class Role { kSystem, kUser, kAssistant };

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  GenerationParams params;
  // Empty selects the backend's default model.
  std::string model;
  std::string request_digest;

  // Validates the messages and fills in request_digest.
  static ChatRequest make(std::vector<ChatMessage> messages, GenerationParams params,
                          std::string model = {});
};

enum class FinishReason { kStop, kLength, kError };

struct Completion {
  std::string content;
  FinishReason finish_reason = FinishReason::kStop;
  std::string backend_id;
  std::int64_t latency_ms = 0;

  bool truncated() const { return finish_reason == FinishReason::kLength; }
};

std::string to_string(Role role);
Role role_from_string(const std::string& s);
std::string to_string(FinishReason reason);
FinishReason finish_reason_from_string(const std::string& s);

// Canonical serialization hashed into the request digest: role, content,
// temperature, top_p and max_tokens, as compact key-sorted JSON.
std::string canonical_request(const std::vector<ChatMessage>& messages,
                              const GenerationParams& params);
// SHA-256 hex of canonical_request().
std::string request_digest(const std::vector<ChatMessage>& messages,
                           const GenerationParams& params);

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const Completion& c);
void from_json(const nlohmann::json& j, Completion& c);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
};

// Deterministic backend for tests: answers from a queue or a responder.
class ScriptedBackend : public Backend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  explicit ScriptedBackend(std::vector<std::string> queue);
  explicit ScriptedBackend(Responder responder);

  Completion complete(const ChatRequest& request) override;
  std::string id() const override { return "scripted"; }

  std::vector<ChatRequest> requests() const;
  std::size_t calls() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> queue_;
  Responder responder_;
  std::vector<ChatRequest> requests_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{500};
  double factor = 2.0;
  // Relative jitter: each delay is scaled by a uniform draw in [1-j, 1+j].
  double jitter = 0.2;

  // Delay before retry number `retry` (0-based), jittered by `rng`.
  std::chrono::milliseconds delay_for(int retry, std::mt19937_64& rng) const;
};

// True for transport failures, rate limiting and 5xx provider errors.
bool is_retryable(const std::exception& error);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Runs `attempt` until it succeeds, fails non-retryably, or the policy's
// attempt limit is reached; the last error is rethrown.
Completion run_with_retry(const RetryPolicy& policy, const Sleeper& sleep,
                          std::mt19937_64& rng,
                          const std::function<Completion()>& attempt);

struct HttpBackendOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  std::string api_key;
  std::chrono::seconds timeout{120};
  int max_in_flight = 4;
  RetryPolicy retry;
  // Defaults to std::this_thread::sleep_for.
  Sleeper sleeper;
};

inline constexpr const char* kApiKeyEnv = "CRITIQUE_FORGE_API_KEY";

// Chat-completions client. Thread-safe; at most max_in_flight requests run
// concurrently.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  ~HttpBackend() override;

  Completion complete(const ChatRequest& request) override;
  std::string id() const override { return "http:" + options_.model; }

  // JSON body sent on the wire for `request`.
  nlohmann::json wire_payload(const ChatRequest& request) const;

 private:
  Completion attempt_once(const ChatRequest& request);

  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::counting_semaphore<> in_flight_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

// Pass-through backend appending each exchange to a JSON Lines cassette.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path cassette);

  Completion complete(const ChatRequest& request) override;
  std::string id() const override { return "record:" + inner_->id(); }

  std::size_t recorded() const;

 private:
  std::shared_ptr<Backend> inner_;
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::uint64_t seq_ = 0;
};

// Serves completions from a cassette, in recorded order per digest.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(const std::filesystem::path& cassette);

  Completion complete(const ChatRequest& request) override;
  std::string id() const override { return "replay"; }

  // SHA-256 of the cassette file contents.
  const std::string& cassette_digest() const { return cassette_digest_; }
  std::size_t entries() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::deque<Completion>> entries_;
  std::string cassette_digest_;
};

// Which configured model serves a call.
enum class ModelRole { kGenerator, kJudge };

// Front door used by the loops: one backend, per-role model names.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend, std::string generator_model = {},
                   std::string judge_model = {});

  Completion complete(std::vector<ChatMessage> messages, const GenerationParams& params,
                      ModelRole role = ModelRole::kGenerator);

  Backend& backend() { return *backend_; }

 private:
  std::shared_ptr<Backend> backend_;
  std::string generator_model_;
  std::string judge_model_;
};

}  // namespace critique_forge
