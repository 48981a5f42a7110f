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

#include "critique_forge/session.hpp"

#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

Session::Session(Gateway& gateway, const Sandbox& sandbox, SessionOptions options,
                 RunRecord* record)
    : gateway_(gateway), sandbox_(sandbox), options_(std::move(options)), record_(record) {
  options_.loop.validate();
  options_.executor.limits.per_test_timeout_ms = options_.loop.per_test_timeout_ms;
}

Completion Session::ask(PromptKind kind, const PromptContext& context, Preset preset,
                        ModelRole role, bool strict) {
  auto messages = render(kind, context, strict);
  const GenerationParams& params =
      preset == Preset::kCode ? options_.code_params : options_.text_params;
  json logged_messages = messages;
  Completion completion = gateway_.complete(std::move(messages), params, role);
  if (record_) {
    record_->append(stage::kPrompt,
                    json{{"kind", to_string(kind)},
                         {"template_version", kPromptTemplateVersion},
                         {"preset", to_string(preset)},
                         {"strict", strict},
                         {"messages", std::move(logged_messages)},
                         {"completion", completion.content},
                         {"finish_reason", to_string(completion.finish_reason)}},
                    json{{"latency_ms", completion.latency_ms}});
    if (completion.truncated()) {
      record_->append(stage::kWarning,
                      json{{"kind", to_string(kind)}, {"message", "completion truncated"}});
    }
  }
  return completion;
}

ExecutionReport Session::execute(std::string_view source, const std::vector<TestCase>& tests,
                                 std::string_view purpose) {
  ExecutionReport report =
      sandbox_.run_tests(source, options_.executor.language, tests, options_.executor.limits);
  if (record_) {
    json wall = json::array();
    for (const auto& r : report.per_test) wall.push_back(r.wall_time_ms);
    record_->append(stage::kExecution,
                    json{{"purpose", purpose},
                         {"language", options_.executor.language},
                         {"report", report}},
                    json{{"wall_time_ms", std::move(wall)}});
  }
  return report;
}

void Session::note(std::string stage, json payload) {
  if (record_) record_->append(std::move(stage), std::move(payload));
}

std::string extract_code(std::string_view completion) {
  if (auto block = text::first_fenced_block(completion)) return *block;
  return std::string(completion);
}

}  // namespace critique_forge
