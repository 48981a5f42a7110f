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

#include "critique_forge/runners.hpp"

#include <charconv>

#include "critique_forge/error.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

std::string to_string(Method method) {
  switch (method) {
    case Method::kBaseline: return "baseline";
    case Method::kSelfSelection: return "self-selection";
    case Method::kSelfIteration: return "self-iteration";
  }
  return "self-iteration";
}

Method method_from_string(const std::string& s) {
  for (auto m : {Method::kBaseline, Method::kSelfSelection, Method::kSelfIteration}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown method: " + s);
}

Explanation baseline_explanation(Session& session, const Problem& p, const Solution& s) {
  auto completion = session.ask(PromptKind::kBaselineExplanation,
                                {{field::kProblem, p.description}, {field::kSolution, s.source}},
                                Preset::kText);
  return parse_explanation(completion.content, 0);
}

std::optional<std::size_t> parse_selection(std::string_view completion, std::size_t candidates) {
  auto lines = text::split_lines(completion);
  for (std::size_t i = lines.size(); i-- > 0;) {
    std::string_view line = text::trim(lines[i]);
    while (!line.empty() && (line.front() == '*' || line.front() == '#')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == '*' || line.back() == '.')) line.remove_suffix(1);
    line = text::trim(line);
    constexpr std::string_view kKey = "SELECTED:";
    if (line.size() <= kKey.size()) continue;
    bool match = true;
    for (std::size_t j = 0; j < kKey.size(); ++j) {
      if (std::toupper(static_cast<unsigned char>(line[j])) != kKey[j]) match = false;
    }
    if (!match) continue;
    std::string_view number = text::trim(line.substr(kKey.size()));
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || ptr != number.data() + number.size()) return std::nullopt;
    if (value < 1 || value > candidates) return std::nullopt;
    return value - 1;
  }
  return std::nullopt;
}

Selection select_candidate(Session& session, const Problem& p, const Solution& s,
                           const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw ContractError("selection needs at least one candidate");
  auto completion = session.ask(PromptKind::kSelectExplanation,
                                {{field::kProblem, p.description},
                                 {field::kSolution, s.source},
                                 {field::kCandidates, format_candidates(candidates)}},
                                Preset::kText);
  if (auto index = parse_selection(completion.content, candidates.size())) {
    return {.index = *index, .flagged = false};
  }
  session.note(stage::kWarning,
               json{{"kind", "select_explanation"},
                    {"message", "unparseable selection; first candidate chosen"}});
  return {.index = 0, .flagged = true};
}

Explanation self_selection_explanation(Session& session, const Problem& p, const Solution& s) {
  std::vector<Explanation> samples;
  std::vector<std::string> texts;
  for (int i = 0; i < session.loop().samples_per_problem; ++i) {
    samples.push_back(baseline_explanation(session, p, s));
    texts.push_back(format_explanation(samples.back()));
  }
  auto selection = select_candidate(session, p, s, texts);
  return samples[selection.index];
}

namespace {

const Solution& oracle_solution(const Problem& p) {
  if (p.solutions.empty()) throw ContractError("problem " + p.id + " has no oracle solution");
  return p.solutions.front();
}

}  // namespace

namespace {

PipelineResult run_pipeline_unguarded(Session& session, const Problem& p,
                                      const std::optional<UserHistory>& history, Method method,
                                      Caches* caches) {
  const Solution& s = oracle_solution(p);
  PipelineResult result;
  Explanation e;
  switch (method) {
    case Method::kBaseline:
      e = baseline_explanation(session, p, s);
      break;
    case Method::kSelfSelection:
      e = self_selection_explanation(session, p, s);
      break;
    case Method::kSelfIteration: {
      FaithfulnessLoop loop(session, caches ? &caches->reflections : nullptr);
      e = loop.run(p, s).final;
      break;
    }
  }

  std::optional<PersonalizedExplanation> pe;
  if (history) {
    PersonalizationLoop loop(session, caches ? &caches->profiles : nullptr);
    switch (method) {
      case Method::kBaseline: {
        result.profile = loop.extract_profile(history->user_id, history->inquiries);
        pe = loop.init_personalized(p, s, *result.profile, e);
        break;
      }
      case Method::kSelfSelection: {
        result.profile = loop.extract_profile(history->user_id, history->inquiries);
        std::vector<PersonalizedExplanation> drafts;
        std::vector<std::string> texts;
        for (int i = 0; i < session.loop().samples_per_problem; ++i) {
          drafts.push_back(loop.init_personalized(p, s, *result.profile, e));
          texts.push_back(drafts.back().body);
        }
        pe = drafts[select_candidate(session, p, s, texts).index];
        break;
      }
      case Method::kSelfIteration: {
        auto personalized = loop.run(p, s, e, history->user_id, history->inquiries);
        result.profile = personalized.profile;
        pe = personalized.final;
        break;
      }
    }
  }

  result.output = assemble_final(e, pe);
  session.note(stage::kFinalOutput, json(result.output));
  return result;
}

}  // namespace

PipelineResult run_pipeline(Session& session, const Problem& p,
                            const std::optional<UserHistory>& history, Method method,
                            Caches* caches) {
  try {
    return run_pipeline_unguarded(session, p, history, method, caches);
  } catch (const Error& error) {
    if (session.record() && !session.record()->failed()) {
      session.note(stage::kRunFailed, json{{"loop", to_string(method)}, {"error", error.what()}});
    }
    throw;
  }
}

json final_output_document(const PipelineResult& result, const Problem& p,
                           const std::optional<std::string>& user_id, Method method, int sample) {
  return json{{"problem_id", p.id},
              {"problem", p.description},
              {"solution", p.solutions.empty() ? std::string() : p.solutions.front().source},
              {"user_id", user_id ? json(*user_id) : json(nullptr)},
              {"method", to_string(method)},
              {"sample", sample},
              {"profile", result.profile ? json(*result.profile) : json(nullptr)},
              {"final", result.output}};
}

}  // namespace critique_forge
