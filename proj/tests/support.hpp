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

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "critique_forge/compose.hpp"
#include "critique_forge/corpus.hpp"
#include "critique_forge/error.hpp"
#include "critique_forge/gateway.hpp"
#include "critique_forge/prompts.hpp"
#include "critique_forge/run_record.hpp"
#include "critique_forge/sandbox.hpp"
#include "critique_forge/session.hpp"

namespace cf_test {

namespace cf = critique_forge;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CF_FIXTURE_DIR) / name;
}

inline const std::vector<cf::PromptKind>& all_kinds() {
  static const std::vector<cf::PromptKind> kinds{
      cf::PromptKind::kReflectProblem,      cf::PromptKind::kInitExplanation,
      cf::PromptKind::kReviseExplanation,   cf::PromptKind::kGenVerificationSolution,
      cf::PromptKind::kAnalyzeFailure,      cf::PromptKind::kExtractProfile,
      cf::PromptKind::kInitPersonalized,    cf::PromptKind::kRevisePersonalized,
      cf::PromptKind::kJudgeRating,         cf::PromptKind::kJudgeCompare,
      cf::PromptKind::kSolveFromExplanation, cf::PromptKind::kBaselineExplanation,
      cf::PromptKind::kSelectExplanation};
  return kinds;
}

// Labeled sections of the user message of a rendered prompt.
inline std::map<std::string, std::string> sections(const std::vector<cf::ChatMessage>& messages) {
  std::map<std::string, std::string> out;
  for (const auto& m : messages) {
    if (m.role != cf::Role::kUser) continue;
    for (auto& seg : cf::parse_composed(m.content)) out[seg.label] = seg.body;
  }
  return out;
}

// Identifies the prompt kind of a request from its section labels and TASK
// instructions.
inline cf::PromptKind kind_of(const std::vector<cf::ChatMessage>& messages) {
  struct Shape {
    cf::PromptKind kind;
    std::vector<std::string> labels;
    std::string task;
  };
  auto labels_of = [](const std::map<std::string, std::string>& secs) {
    std::vector<std::string> out;
    for (const auto& [label, body] : secs) out.push_back(label);
    return out;
  };
  static const auto shapes = [&] {
    std::vector<Shape> out;
    for (auto kind : all_kinds()) {
      cf::PromptContext ctx;
      for (const auto& f : cf::required_fields(kind)) ctx[f] = "x";
      auto secs = sections(cf::render(kind, ctx));
      out.push_back({kind, labels_of(secs), secs.at("TASK")});
    }
    return out;
  }();
  const auto secs = sections(messages);
  const auto labels = labels_of(secs);
  const std::string& task = secs.at("TASK");
  for (const auto& shape : shapes) {
    if (shape.labels == labels && task.rfind(shape.task, 0) == 0) return shape.kind;
  }
  throw std::runtime_error("unrecognised prompt");
}

inline cf::PromptKind kind_of(const cf::ChatRequest& request) { return kind_of(request.messages); }

// Scripted answers per prompt kind, consumed in order. A kind may instead
// get a handler that sees the request.
class KindScript {
 public:
  using Handler = std::function<std::string(const cf::ChatRequest&)>;

  KindScript& add(cf::PromptKind kind, std::vector<std::string> replies) {
    for (auto& r : replies) queues_[kind].push_back(std::move(r));
    return *this;
  }
  KindScript& on(cf::PromptKind kind, Handler handler) {
    handlers_[kind] = std::move(handler);
    return *this;
  }

  std::string answer(const cf::ChatRequest& request) {
    const auto kind = kind_of(request);
    std::lock_guard lock(mu_);
    ++counts_[kind];
    if (auto it = handlers_.find(kind); it != handlers_.end()) return it->second(request);
    auto& queue = queues_[kind];
    if (queue.empty()) throw cf::ScriptExhausted("no scripted reply for " + cf::to_string(kind));
    std::string reply = std::move(queue.front());
    queue.pop_front();
    return reply;
  }

  int count(cf::PromptKind kind) const {
    std::lock_guard lock(mu_);
    auto it = counts_.find(kind);
    return it == counts_.end() ? 0 : it->second;
  }

 private:
  mutable std::mutex mu_;
  std::map<cf::PromptKind, std::deque<std::string>> queues_;
  std::map<cf::PromptKind, Handler> handlers_;
  std::map<cf::PromptKind, int> counts_;
};

inline cf::SessionOptions test_options(int max_iterations = 4) {
  cf::SessionOptions options;
  options.loop.max_iterations = max_iterations;
  options.loop.per_test_timeout_ms = 5000;
  return options;
}

// Scripted backend, gateway, sandbox, record and session for one run.
struct World {
  explicit World(std::shared_ptr<KindScript> script_in,
                 cf::SessionOptions options = test_options(), std::string problem_id = "p",
                 std::optional<std::string> user_id = std::nullopt)
      : script(std::move(script_in)),
        backend(std::make_shared<cf::ScriptedBackend>(
            [s = script](const cf::ChatRequest& r) { return s->answer(r); })),
        gateway(backend, "gen-model", "judge-model"),
        record("run-test", std::move(problem_id), std::move(user_id), [] { return "T"; }),
        session(gateway, sandbox, std::move(options), &record) {}

  explicit World(std::shared_ptr<cf::Backend> raw, cf::SessionOptions options = test_options())
      : gateway(raw, "gen-model", "judge-model"),
        record("run-test", "p", std::nullopt, [] { return "T"; }),
        session(gateway, sandbox, std::move(options), &record) {}

  // Prompts of `kind` found in the run record.
  std::vector<std::vector<cf::ChatMessage>> prompts(cf::PromptKind kind) const {
    std::vector<std::vector<cf::ChatMessage>> out;
    for (const auto* event : record.find(cf::stage::kPrompt)) {
      if (event->payload.at("kind") != cf::to_string(kind)) continue;
      out.push_back(event->payload.at("messages").get<std::vector<cf::ChatMessage>>());
    }
    return out;
  }

  std::shared_ptr<KindScript> script;
  std::shared_ptr<cf::ScriptedBackend> backend;
  cf::Gateway gateway;
  cf::Sandbox sandbox;
  cf::RunRecord record;
  cf::Session session;
};

inline const std::string kSumSource = "a, b = map(int, input().split())\nprint(a + b)\n";
inline const std::string kWrongSource = "print(42)\n";

inline std::string fenced(const std::string& code) { return "```python\n" + code + "```\n"; }

inline cf::Problem toy_problem() {
  return cf::load_problems(fixture("toy.jsonl"), cf::Split::kValidation).corpus.find("echo-sum");
}

inline const std::string kTwoPart =
    "STEP-BY-STEP:\nRead a and b, add them, print the sum.\nHIGH-LEVEL:\nDirect arithmetic.";

}  // namespace cf_test
