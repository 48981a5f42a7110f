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

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critique_forge/gateway.hpp"
#include "critique_forge/prompts.hpp"
#include "critique_forge/run_record.hpp"
#include "critique_forge/sandbox.hpp"
#include "critique_forge/types.hpp"

namespace critique_forge {

struct ExecutorSettings {
  // Language the verification and scoring programs are run as.
  std::string language = "python3";
  ExecutionLimits limits;
};

struct SessionOptions {
  LoopConfig loop;
  ExecutorSettings executor;
  GenerationParams code_params = GenerationParams::code();
  GenerationParams text_params = GenerationParams::text();
};

// Everything a pipeline stage needs: model access, program execution and the
// run's trace. One Session serves one run; it is not shared between threads.
class Session {
 public:
  Session(Gateway& gateway, const Sandbox& sandbox, SessionOptions options,
          RunRecord* record = nullptr);

  // Renders `kind`, completes it and logs the exchange.
  Completion ask(PromptKind kind, const PromptContext& context, Preset preset,
                 ModelRole role = ModelRole::kGenerator, bool strict = false);

  // Runs `source` in the configured language and logs the report.
  ExecutionReport execute(std::string_view source, const std::vector<TestCase>& tests,
                          std::string_view purpose);

  void note(std::string stage, nlohmann::json payload);

  const LoopConfig& loop() const { return options_.loop; }
  const SessionOptions& options() const { return options_; }
  RunRecord* record() { return record_; }

 private:
  Gateway& gateway_;
  const Sandbox& sandbox_;
  SessionOptions options_;
  RunRecord* record_;
};

// Thread-safe memo keyed by string, used for per-problem reflections and
// per-user profiles.
template <typename Value>
class KeyedCache {
 public:
  template <typename Compute>
  Value get_or_compute(const std::string& key, Compute&& compute) {
    {
      std::lock_guard lock(mu_);
      if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    Value value = compute();
    std::lock_guard lock(mu_);
    return values_.try_emplace(key, std::move(value)).first->second;
  }

  std::optional<Value> get(const std::string& key) const {
    std::lock_guard lock(mu_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    return std::nullopt;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, Value> values_;
};

// Code from the first fenced block, or the whole completion when unfenced.
std::string extract_code(std::string_view completion);

}  // namespace critique_forge
