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

#include "critique_forge/gateway.hpp"

#include <cmath>
#include <thread>

#include "critique_forge/error.hpp"
#include "critique_forge/io.hpp"

namespace critique_forge {

using nlohmann::json;

ChatRequest ChatRequest::make(std::vector<ChatMessage> messages, GenerationParams params,
                              std::string model) {
  for (const auto& m : messages) {
    if (m.role != Role::kAssistant && m.content.empty()) {
      throw ContractError(to_string(m.role) + " message content must be non-empty");
    }
  }
  ChatRequest request;
  request.request_digest = critique_forge::request_digest(messages, params);
  request.messages = std::move(messages);
  request.params = params;
  request.model = std::move(model);
  return request;
}

std::string to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

Role role_from_string(const std::string& s) {
  if (s == "system") return Role::kSystem;
  if (s == "user") return Role::kUser;
  if (s == "assistant") return Role::kAssistant;
  throw Error("unknown chat role: " + s);
}

std::string to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::kStop: return "stop";
    case FinishReason::kLength: return "length";
    case FinishReason::kError: return "error";
  }
  return "error";
}

FinishReason finish_reason_from_string(const std::string& s) {
  if (s == "stop") return FinishReason::kStop;
  if (s == "length") return FinishReason::kLength;
  return FinishReason::kError;
}

std::string canonical_request(const std::vector<ChatMessage>& messages,
                              const GenerationParams& params) {
  json msgs = json::array();
  for (const auto& m : messages) {
    msgs.push_back(json{{"role", to_string(m.role)}, {"content", m.content}});
  }
  json canonical{{"messages", std::move(msgs)},
                 {"temperature", params.temperature},
                 {"top_p", params.top_p},
                 {"max_tokens", params.max_tokens}};
  return canonical.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string request_digest(const std::vector<ChatMessage>& messages,
                           const GenerationParams& params) {
  return io::sha256_hex(canonical_request(messages, params));
}

void to_json(json& j, const ChatMessage& m) {
  j = json{{"role", to_string(m.role)}, {"content", m.content}};
}

void from_json(const json& j, ChatMessage& m) {
  m.role = role_from_string(j.at("role").get<std::string>());
  m.content = j.at("content").get<std::string>();
}

void to_json(json& j, const Completion& c) {
  j = json{{"content", c.content},
           {"finish_reason", to_string(c.finish_reason)},
           {"backend_id", c.backend_id},
           {"latency_ms", c.latency_ms}};
}

void from_json(const json& j, Completion& c) {
  c.content = j.at("content").get<std::string>();
  c.finish_reason = finish_reason_from_string(j.value("finish_reason", "stop"));
  c.backend_id = j.value("backend_id", "");
  c.latency_ms = j.value("latency_ms", std::int64_t{0});
}

// ScriptedBackend

ScriptedBackend::ScriptedBackend(std::vector<std::string> queue)
    : queue_(queue.begin(), queue.end()) {}

ScriptedBackend::ScriptedBackend(Responder responder) : responder_(std::move(responder)) {}

Completion ScriptedBackend::complete(const ChatRequest& request) {
  std::unique_lock lock(mu_);
  requests_.push_back(request);
  std::string content;
  if (responder_) {
    auto responder = responder_;
    lock.unlock();
    content = responder(request);
  } else {
    if (queue_.empty()) {
      throw ScriptExhausted("scripted backend has no completions left");
    }
    content = std::move(queue_.front());
    queue_.pop_front();
  }
  return {.content = std::move(content),
          .finish_reason = FinishReason::kStop,
          .backend_id = id(),
          .latency_ms = 0};
}

std::vector<ChatRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

// Retry

std::chrono::milliseconds RetryPolicy::delay_for(int retry, std::mt19937_64& rng) const {
  const double base = static_cast<double>(initial_delay.count()) * std::pow(factor, retry);
  std::uniform_real_distribution<double> scale(1.0 - jitter, 1.0 + jitter);
  const double jittered = jitter > 0 ? base * scale(rng) : base;
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(jittered)));
}

bool is_retryable(const std::exception& error) {
  if (dynamic_cast<const TransportError*>(&error)) return true;
  if (dynamic_cast<const RateLimited*>(&error)) return true;
  if (const auto* provider = dynamic_cast<const ProviderError*>(&error)) {
    return provider->status() >= 500;
  }
  return false;
}

Completion run_with_retry(const RetryPolicy& policy, const Sleeper& sleep,
                          std::mt19937_64& rng, const std::function<Completion()>& attempt) {
  const int attempts = std::max(1, policy.max_attempts);
  for (int i = 0;; ++i) {
    try {
      return attempt();
    } catch (const GatewayError& error) {
      if (!is_retryable(error) || i + 1 >= attempts) throw;
      const auto delay = policy.delay_for(i, rng);
      if (sleep) {
        sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
  }
}

// Gateway

Gateway::Gateway(std::shared_ptr<Backend> backend, std::string generator_model,
                 std::string judge_model)
    : backend_(std::move(backend)),
      generator_model_(std::move(generator_model)),
      judge_model_(std::move(judge_model)) {
  if (!backend_) throw ConfigError("gateway requires a backend");
}

Completion Gateway::complete(std::vector<ChatMessage> messages, const GenerationParams& params,
                             ModelRole role) {
  std::string model = role == ModelRole::kJudge && !judge_model_.empty() ? judge_model_
                                                                         : generator_model_;
  return backend_->complete(ChatRequest::make(std::move(messages), params, std::move(model)));
}

}  // namespace critique_forge
