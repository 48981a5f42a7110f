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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critique_forge/corpus.hpp"
#include "critique_forge/faithfulness.hpp"
#include "critique_forge/personalization.hpp"
#include "critique_forge/session.hpp"

namespace critique_forge {

enum class Method { kBaseline, kSelfSelection, kSelfIteration };

std::string to_string(Method method);
// "baseline", "self-selection" or "self-iteration".
Method method_from_string(const std::string& s);

// Single-shot explanation: one completion, no loops.
Explanation baseline_explanation(Session& session, const Problem& p, const Solution& s);

// 0-based index from the last "SELECTED: i" line (1-based in the text).
std::optional<std::size_t> parse_selection(std::string_view completion, std::size_t candidates);

struct Selection {
  std::size_t index = 0;
  // Set when the ranking reply was unparseable and the first candidate won.
  bool flagged = false;
};

// One ranking completion over `candidates`.
Selection select_candidate(Session& session, const Problem& p, const Solution& s,
                           const std::vector<std::string>& candidates);

// samples_per_problem baseline samples plus one ranking completion.
Explanation self_selection_explanation(Session& session, const Problem& p, const Solution& s);

struct Caches {
  KeyedCache<ProblemReflection> reflections;
  KeyedCache<UserProfile> profiles;
};

struct PipelineResult {
  FinalOutput output;
  std::optional<UserProfile> profile;
};

// Produces e with `method`, personalizes it when a history is given, and
// records the single final_output event.
PipelineResult run_pipeline(Session& session, const Problem& p,
                            const std::optional<UserHistory>& history, Method method,
                            Caches* caches = nullptr);

// Deterministic document written for each pipeline run; carries the problem
// text and oracle solution so stored runs can be judged later on their own.
nlohmann::json final_output_document(const PipelineResult& result, const Problem& p,
                                     const std::optional<std::string>& user_id, Method method,
                                     int sample);

}  // namespace critique_forge
