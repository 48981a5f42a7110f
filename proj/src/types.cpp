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

#include "critique_forge/types.hpp"

#include <algorithm>

#include "critique_forge/compose.hpp"
#include "critique_forge/error.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

Solution Solution::make(std::string language_tag, std::string source) {
  Solution s;
  s.char_length = text::utf8_length(source);
  s.language_tag = std::move(language_tag);
  s.source = std::move(source);
  return s;
}

ExecutionReport ExecutionReport::from(std::vector<TestResult> results) {
  ExecutionReport report;
  report.all_passed = std::all_of(results.begin(), results.end(), [](const auto& r) {
    return r.verdict == Verdict::kAccepted;
  });
  report.per_test = std::move(results);
  return report;
}

std::size_t ExecutionReport::accepted_count() const {
  return static_cast<std::size_t>(std::count_if(
      per_test.begin(), per_test.end(),
      [](const auto& r) { return r.verdict == Verdict::kAccepted; }));
}

GenerationParams GenerationParams::code() {
  return {.temperature = 0.2, .top_p = 0.1, .max_tokens = 2048, .preset = Preset::kCode};
}

GenerationParams GenerationParams::text() {
  return {.temperature = 0.7, .top_p = 0.8, .max_tokens = 2048, .preset = Preset::kText};
}

void LoopConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (samples_per_problem < 1) throw ConfigError("samples_per_problem must be >= 1");
  if (satisfaction_threshold < 1) throw ConfigError("satisfaction_threshold must be >= 1");
  if (per_test_timeout_ms < 1) throw ConfigError("per_test_timeout_ms must be >= 1");
}

std::string render_explanation(const Explanation& e) {
  return compose({{kStepByStepLabel, e.step_by_step}, {kHighLevelLabel, e.high_level}});
}

FinalOutput assemble_final(const Explanation& e,
                           const std::optional<PersonalizedExplanation>& pe) {
  std::vector<Segment> segments{{kStepByStepLabel, e.step_by_step},
                                {kHighLevelLabel, e.high_level}};
  if (pe) segments.push_back({kPersonalizedLabel, pe->body});
  return {.faithful = e, .personalized = pe, .combined_text = compose(segments)};
}

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kPublic: return "public";
    case TestKind::kPrivate: return "private";
    case TestKind::kGenerated: return "generated";
  }
  return "public";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kAccepted: return "Accepted";
    case Verdict::kWrongAnswer: return "WrongAnswer";
    case Verdict::kRuntimeError: return "RuntimeError";
    case Verdict::kTimeout: return "Timeout";
  }
  return "RuntimeError";
}

std::string to_string(Preset preset) {
  return preset == Preset::kCode ? "code" : "text";
}

TestKind test_kind_from_string(const std::string& s) {
  if (s == "public") return TestKind::kPublic;
  if (s == "private") return TestKind::kPrivate;
  if (s == "generated") return TestKind::kGenerated;
  throw Error("unknown test kind: " + s);
}

Verdict verdict_from_string(const std::string& s) {
  for (auto v : {Verdict::kAccepted, Verdict::kWrongAnswer, Verdict::kRuntimeError,
                 Verdict::kTimeout}) {
    if (to_string(v) == s) return v;
  }
  throw Error("unknown verdict: " + s);
}

void to_json(json& j, const TestCase& v) {
  j = json{{"input", v.input}, {"output", v.expected_output}, {"kind", to_string(v.kind)}};
}

void from_json(const json& j, TestCase& v) {
  v.input = j.at("input").get<std::string>();
  v.expected_output = j.at("output").get<std::string>();
  v.kind = test_kind_from_string(j.value("kind", std::string("public")));
}

void to_json(json& j, const Solution& v) {
  j = json{{"language", v.language_tag}, {"source", v.source}};
}

void to_json(json& j, const ProblemReflection& v) {
  j = json{{"goals", v.goals},           {"inputs", v.inputs}, {"outputs", v.outputs},
           {"conditions", v.conditions}, {"other", v.other},   {"raw", v.raw}};
}

void to_json(json& j, const Explanation& v) {
  j = json{{"step_by_step", v.step_by_step},
           {"high_level", v.high_level},
           {"iteration", v.iteration},
           {"verified", v.verified}};
}

void from_json(const json& j, Explanation& v) {
  v.step_by_step = j.at("step_by_step").get<std::string>();
  v.high_level = j.at("high_level").get<std::string>();
  v.iteration = j.at("iteration").get<int>();
  v.verified = j.at("verified").get<bool>();
}

void to_json(json& j, const TestResult& v) {
  j = json{{"verdict", to_string(v.verdict)},
           {"actual_output", v.actual_output},
           {"stderr", v.stderr_text}};
}

void to_json(json& j, const ExecutionReport& v) {
  j = json{{"per_test", v.per_test}, {"all_passed", v.all_passed}};
}

void to_json(json& j, const VerificationAttempt& v) {
  j = json{{"iteration", v.iteration},
           {"verification_source", v.verification_source},
           {"report", v.report},
           {"analysis", v.analysis ? json(*v.analysis) : json(nullptr)}};
}

void to_json(json& j, const UserInquiry& v) {
  j = json{{"title", v.title}, {"tags", v.tags}, {"body", v.body}, {"posted_at", v.posted_at}};
}

void to_json(json& j, const UserProfile& v) {
  j = json{{"programming_languages", v.programming_languages},
           {"skill_level", v.skill_level},
           {"topics_of_interest", v.topics_of_interest},
           {"problem_solving_approach", v.problem_solving_approach},
           {"experience", v.experience},
           {"other", v.other},
           {"raw", v.raw}};
}

void from_json(const json& j, UserProfile& v) {
  v.programming_languages = j.value("programming_languages", "");
  v.skill_level = j.value("skill_level", "");
  v.topics_of_interest = j.value("topics_of_interest", "");
  v.problem_solving_approach = j.value("problem_solving_approach", "");
  v.experience = j.value("experience", "");
  v.other = j.value("other", "");
  v.raw = j.at("raw").get<std::string>();
}

void to_json(json& j, const JudgeRating& v) {
  j = json{{"score", v.score},
           {"satisfied", v.satisfied},
           {"suggestions", v.suggestions},
           {"raw", v.raw},
           {"parsed", v.parsed}};
}

void from_json(const json& j, JudgeRating& v) {
  v.score = j.at("score").get<int>();
  v.satisfied = j.at("satisfied").get<bool>();
  v.suggestions = j.at("suggestions").get<std::string>();
  v.raw = j.at("raw").get<std::string>();
  v.parsed = j.value("parsed", true);
}

void to_json(json& j, const PersonalizedExplanation& v) {
  j = json{{"body", v.body},
           {"iteration", v.iteration},
           {"rating", v.rating ? json(*v.rating) : json(nullptr)}};
}

void from_json(const json& j, PersonalizedExplanation& v) {
  v.body = j.at("body").get<std::string>();
  v.iteration = j.at("iteration").get<int>();
  if (j.contains("rating") && !j.at("rating").is_null()) {
    v.rating = j.at("rating").get<JudgeRating>();
  } else {
    v.rating.reset();
  }
}

void to_json(json& j, const FinalOutput& v) {
  j = json{{"faithful", v.faithful},
           {"personalized", v.personalized ? json(*v.personalized) : json(nullptr)},
           {"combined_text", v.combined_text}};
}

void from_json(const json& j, FinalOutput& v) {
  v.faithful = j.at("faithful").get<Explanation>();
  if (!j.at("personalized").is_null()) {
    v.personalized = j.at("personalized").get<PersonalizedExplanation>();
  } else {
    v.personalized.reset();
  }
  v.combined_text = j.at("combined_text").get<std::string>();
}

}  // namespace critique_forge
