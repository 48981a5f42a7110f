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
#include <string>
#include <string_view>
#include <vector>

#include "critique_forge/gateway.hpp"
#include "critique_forge/types.hpp"

namespace critique_forge {

// Bumped whenever template wording changes; recorded with every prompt.
inline constexpr int kPromptTemplateVersion = 1;

enum class PromptKind {
  kReflectProblem,
  kInitExplanation,
  kReviseExplanation,
  kGenVerificationSolution,
  kAnalyzeFailure,
  kExtractProfile,
  kInitPersonalized,
  kRevisePersonalized,
  kJudgeRating,
  kJudgeCompare,
  // Harness and baseline prompts.
  kSolveFromExplanation,
  kBaselineExplanation,
  kSelectExplanation,
};

std::string to_string(PromptKind kind);

// Context keys, by symbol.
namespace field {
inline constexpr const char* kProblem = "p";
inline constexpr const char* kSolution = "s";
inline constexpr const char* kReflection = "pr";
inline constexpr const char* kExplanation = "e";
inline constexpr const char* kCurrentExplanation = "e_i";
inline constexpr const char* kVerificationSource = "vs_i";
inline constexpr const char* kExecutorOutput = "eo_i";
inline constexpr const char* kAnalysis = "a_i";
inline constexpr const char* kHistory = "h";
inline constexpr const char* kProfile = "up";
inline constexpr const char* kPersonalized = "pe_i";
inline constexpr const char* kRating = "r_i";
inline constexpr const char* kCandidateA = "pe_A";
inline constexpr const char* kCandidateB = "pe_B";
inline constexpr const char* kCandidates = "candidates";
}  // namespace field

using PromptContext = std::map<std::string, std::string>;

// Required context keys for `kind`, in rendering order.
const std::vector<std::string>& required_fields(PromptKind kind);

// Section headings the model is told to emit.
inline const std::vector<std::string> kReflectionHeadings{"GOALS", "INPUTS", "OUTPUTS",
                                                          "CONDITIONS", "OTHER"};
inline const std::vector<std::string> kProfileHeadings{
    "PROGRAMMING LANGUAGES", "SKILL LEVEL", "TOPICS OF INTEREST",
    "PROBLEM-SOLVING APPROACH", "EXPERIENCE", "OTHER"};
inline const std::vector<std::string> kExplanationHeadings{"STEP-BY-STEP", "HIGH-LEVEL"};

// [system, user]. The user message composes every context value verbatim
// followed by the task instructions. `strict` appends a reminder about the
// required verdict line, used when re-asking after an unparseable answer.
// Throws MissingField / UnexpectedField when the context does not match the
// kind's required set.
std::vector<ChatMessage> render(PromptKind kind, const PromptContext& context,
                                bool strict = false);

// Plain-text renderings of typed values for use as context fields.
std::string format_explanation(const Explanation& e);
std::string format_reflection(const ProblemReflection& pr);
std::string format_profile(const UserProfile& up);
std::string format_history(const std::vector<UserInquiry>& h);
std::string format_rating(const JudgeRating& r);
std::string format_execution(const std::vector<TestCase>& tests, const ExecutionReport& report);
std::string format_candidates(const std::vector<std::string>& candidates);

}  // namespace critique_forge
