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

#include <chrono>
#include <thread>

#include "critique_forge/error.hpp"
#include "critique_forge/gateway.hpp"
#include "httplib.h"

namespace critique_forge {

using nlohmann::json;

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)),
      in_flight_(std::max(1, options_.max_in_flight)),
      rng_(std::random_device{}()) {
  if (options_.api_key.empty()) {
    throw ConfigError(std::string("live backend needs an API key in ") + kApiKeyEnv);
  }
  const auto scheme_end = options_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base_url must include a scheme: " + options_.base_url);
  }
  const auto path_start = options_.base_url.find('/', scheme_end + 3);
  scheme_host_port_ = options_.base_url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : options_.base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

HttpBackend::~HttpBackend() = default;

json HttpBackend::wire_payload(const ChatRequest& request) const {
  return json{{"model", request.model.empty() ? options_.model : request.model},
              {"messages", request.messages},
              {"temperature", request.params.temperature},
              {"top_p", request.params.top_p},
              {"max_tokens", request.params.max_tokens}};
}

Completion HttpBackend::attempt_once(const ChatRequest& request) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers{{"Authorization", "Bearer " + options_.api_key}};

  const auto start = std::chrono::steady_clock::now();
  auto result = client.Post(path_prefix_ + "/chat/completions", headers,
                            wire_payload(request).dump(), "application/json");
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  if (!result) {
    throw TransportError("chat completion request failed: " +
                         httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 429) throw RateLimited("provider rate limit (HTTP 429)");
  if (status < 200 || status >= 300) {
    throw ProviderError(status, "provider returned HTTP " + std::to_string(status) + ": " +
                                    result->body.substr(0, 512));
  }

  try {
    const json body = json::parse(result->body);
    const json& choice = body.at("choices").at(0);
    const json& content = choice.at("message").at("content");
    return {.content = content.is_null() ? std::string() : content.get<std::string>(),
            .finish_reason =
                finish_reason_from_string(choice.value("finish_reason", std::string("stop"))),
            .backend_id = id(),
            .latency_ms = latency.count()};
  } catch (const json::exception& ex) {
    throw ProviderError(status, std::string("malformed completion body: ") + ex.what());
  }
}

Completion HttpBackend::complete(const ChatRequest& request) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  std::mt19937_64 rng;
  {
    std::lock_guard lock(rng_mu_);
    rng.seed(rng_());
  }
  return run_with_retry(options_.retry, options_.sleeper, rng,
                        [&] { return attempt_once(request); });
}

}  // namespace critique_forge
