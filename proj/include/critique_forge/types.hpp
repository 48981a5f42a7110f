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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace critique_forge {

enum class TestKind { kPublic, kPrivate, kGenerated };

struct TestCase {
  std::string input;
  std::string expected_output;
  TestKind kind = TestKind::kPublic;
};

struct Solution {
  std::string language_tag;
  std::string source;
  // Code points in `source`.
  std::size_t char_length = 0;

  static Solution make(std::string language_tag, std::string source);
};

struct Problem {
  std::string id;
  std::string title;
  std::string description;
  std::vector<TestCase> public_tests;
  // Private and generated tests; used only for Pass@k scoring.
  std::vector<TestCase> scoring_tests;
  std::vector<Solution> solutions;
};

struct ProblemReflection {
  std::string goals;
  std::string inputs;
  std::string outputs;
  std::string conditions;
  std::string other;
  std::string raw;
};

struct Explanation {
  std::string step_by_step;
  std::string high_level;
  int iteration = 0;
  bool verified = false;
};

enum class Verdict { kAccepted, kWrongAnswer, kRuntimeError, kTimeout };

struct TestResult {
  Verdict verdict = Verdict::kAccepted;
  std::string actual_output;
  std::string stderr_text;
  std::int64_t wall_time_ms = 0;
};

struct ExecutionReport {
  std::vector<TestResult> per_test;
  bool all_passed = false;

  // Builds a report whose all_passed flag agrees with the verdicts.
  static ExecutionReport from(std::vector<TestResult> results);
  std::size_t accepted_count() const;
};

struct VerificationAttempt {
  int iteration = 0;
  std::string verification_source;
  ExecutionReport report;
  std::optional<std::string> analysis;
};

struct UserInquiry {
  std::string title;
  std::vector<std::string> tags;
  std::string body;
  // RFC 3339.
  std::string posted_at;
};

struct UserProfile {
  std::string programming_languages;
  std::string skill_level;
  std::string topics_of_interest;
  std::string problem_solving_approach;
  std::string experience;
  std::string other;
  std::string raw;
};

struct JudgeRating {
  int score = 1;
  bool satisfied = false;
  std::string suggestions;
  std::string raw;
  // False when the score came from the unparseable-verdict fallback.
  bool parsed = true;
};

struct PersonalizedExplanation {
  std::string body;
  int iteration = 0;
  std::optional<JudgeRating> rating;
};

struct FinalOutput {
  Explanation faithful;
  std::optional<PersonalizedExplanation> personalized;
  std::string combined_text;
};

enum class Preset { kCode, kText };

struct GenerationParams {
  double temperature = 0.7;
  double top_p = 0.8;
  int max_tokens = 2048;
  Preset preset = Preset::kText;

  // Program synthesis: temperature 0.2, top-p 0.1.
  static GenerationParams code();
  // Prose: temperature 0.7, top-p 0.8.
  static GenerationParams text();
};

struct LoopConfig {
  int max_iterations = 4;
  int samples_per_problem = 4;
  int satisfaction_threshold = 8;
  int per_test_timeout_ms = 10000;

  // Throws ConfigError unless every value is strictly positive.
  void validate() const;
};

// Labels used when rendering explanations into composed text.
inline constexpr const char* kStepByStepLabel = "STEP-BY-STEP";
inline constexpr const char* kHighLevelLabel = "HIGH-LEVEL";
inline constexpr const char* kPersonalizedLabel = "PERSONALIZED";

// compose() of the two explanation parts, step-by-step first.
std::string render_explanation(const Explanation& e);

// o = e (+) pe. Faithful content always precedes personalized content.
FinalOutput assemble_final(const Explanation& e,
                           const std::optional<PersonalizedExplanation>& pe);

std::string to_string(TestKind kind);
std::string to_string(Verdict verdict);
std::string to_string(Preset preset);
TestKind test_kind_from_string(const std::string& s);
Verdict verdict_from_string(const std::string& s);

void to_json(nlohmann::json& j, const TestCase& v);
void from_json(const nlohmann::json& j, TestCase& v);
void to_json(nlohmann::json& j, const Solution& v);
void to_json(nlohmann::json& j, const ProblemReflection& v);
void to_json(nlohmann::json& j, const Explanation& v);
void from_json(const nlohmann::json& j, Explanation& v);
void to_json(nlohmann::json& j, const TestResult& v);
void to_json(nlohmann::json& j, const ExecutionReport& v);
void to_json(nlohmann::json& j, const VerificationAttempt& v);
void to_json(nlohmann::json& j, const UserInquiry& v);
void to_json(nlohmann::json& j, const UserProfile& v);
void from_json(const nlohmann::json& j, UserProfile& v);
void to_json(nlohmann::json& j, const JudgeRating& v);
void from_json(const nlohmann::json& j, JudgeRating& v);
void to_json(nlohmann::json& j, const PersonalizedExplanation& v);
void from_json(const nlohmann::json& j, PersonalizedExplanation& v);
void to_json(nlohmann::json& j, const FinalOutput& v);
void from_json(const nlohmann::json& j, FinalOutput& v);

}  // namespace critique_forge
