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

#include "critique_forge/prompts.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "critique_forge/compose.hpp"
#include "critique_forge/error.hpp"

namespace critique_forge {
namespace {

struct Template {
  const char* name;
  std::vector<std::string> fields;
  const char* system;
  const char* task;
  // Reminder appended on a strict re-ask; empty when the kind has no verdict.
  const char* strict;
};

const std::map<std::string, std::string>& field_labels() {
  static const std::map<std::string, std::string> labels{
      {field::kProblem, "PROBLEM"},
      {field::kSolution, "ACCEPTED SOLUTION"},
      {field::kReflection, "PROBLEM REFLECTION"},
      {field::kExplanation, "EXPLANATION"},
      {field::kCurrentExplanation, "CURRENT EXPLANATION"},
      {field::kVerificationSource, "VERIFICATION SOLUTION"},
      {field::kExecutorOutput, "EXECUTION RESULTS"},
      {field::kAnalysis, "FAILURE ANALYSIS"},
      {field::kHistory, "INQUIRY HISTORY"},
      {field::kProfile, "USER PROFILE"},
      {field::kPersonalized, "PERSONALIZED EXPLANATION"},
      {field::kRating, "PREVIOUS RATING"},
      {field::kCandidateA, "EXPLANATION A"},
      {field::kCandidateB, "EXPLANATION B"},
      {field::kCandidates, "CANDIDATE EXPLANATIONS"},
  };
  return labels;
}

const Template& lookup(PromptKind kind) {
  using namespace field;
  static const std::map<PromptKind, Template> templates{
      {PromptKind::kReflectProblem,
       {"reflect_problem",
        {kProblem},
        "You are an expert competitive programmer who reads problem statements carefully "
        "and summarizes exactly what they require.",
        "Extract the key information of the problem. Answer with exactly these section "
        "headings, each on its own line followed by its content:\n"
        "GOALS:\nINPUTS:\nOUTPUTS:\nCONDITIONS:\nOTHER:",
        ""}},
      {PromptKind::kInitExplanation,
       {"init_explanation",
        {kProblem, kSolution, kReflection},
        "You are an expert competitive programmer who writes precise, faithful explanations "
        "of accepted solutions.",
        "Explain the accepted solution. First walk through the code step by step, then give "
        "a high-level understanding of the approach. Use exactly two labeled parts:\n"
        "STEP-BY-STEP:\n<sequential explanation>\nHIGH-LEVEL:\n<overall idea>",
        ""}},
      {PromptKind::kReviseExplanation,
       {"revise_explanation",
        {kProblem, kSolution, kReflection, kCurrentExplanation, kVerificationSource,
         kExecutorOutput, kAnalysis},
        "You are an expert competitive programmer who revises explanations so that a reader "
        "can reimplement the accepted solution correctly.",
        "A programmer wrote the verification solution using only the problem and the current "
        "explanation, and it failed the public tests as shown. Using the failure analysis, "
        "rewrite the explanation so it describes the accepted solution faithfully and covers "
        "what the programmer got wrong. Use exactly two labeled parts:\n"
        "STEP-BY-STEP:\n<sequential explanation>\nHIGH-LEVEL:\n<overall idea>",
        ""}},
      {PromptKind::kGenVerificationSolution,
       {"gen_verification_solution",
        {kProblem, kCurrentExplanation},
        "You are a competitive programmer. You implement solutions in Python 3 that read "
        "standard input and write standard output.",
        "Implement a complete program that solves the problem by following the explanation. "
        "Reply with exactly one fenced code block containing the whole program.",
        ""}},
      {PromptKind::kAnalyzeFailure,
       {"analyze_failure",
        {kProblem, kSolution, kReflection, kVerificationSource, kExecutorOutput},
        "You are an expert code reviewer for competitive programming.",
        "The verification solution failed the public tests shown in the execution results. "
        "Compare it with the accepted solution and analyze the errors in the verification "
        "solution code: which step is wrong, and which detail of the approach was missed.",
        ""}},
      {PromptKind::kExtractProfile,
       {"extract_profile",
        {kHistory},
        "You analyze a programmer's technical questions to understand who they are.",
        "From the inquiry history, describe the user's programming profile. Answer with "
        "exactly these section headings, each on its own line followed by its content:\n"
        "PROGRAMMING LANGUAGES:\nSKILL LEVEL:\nTOPICS OF INTEREST:\n"
        "PROBLEM-SOLVING APPROACH:\nEXPERIENCE:\nOTHER:",
        ""}},
      {PromptKind::kInitPersonalized,
       {"init_personalized",
        {kProblem, kSolution, kProfile, kExplanation},
        "You are a patient programming tutor who adapts explanations to the reader's "
        "background.",
        "Rewrite the explanation of the accepted solution for this particular user, matching "
        "their languages, skill level, interests and experience. Keep it technically "
        "correct.",
        ""}},
      {PromptKind::kRevisePersonalized,
       {"revise_personalized",
        {kProblem, kSolution, kExplanation, kProfile, kPersonalized, kRating},
        "You are a patient programming tutor who adapts explanations to the reader's "
        "background.",
        "The user rated the personalized explanation as shown and left suggestions. Produce "
        "an improved personalized explanation that addresses the suggestions while staying "
        "faithful to the explanation.",
        ""}},
      {PromptKind::kJudgeRating,
       {"judge_rating",
        {kProfile, kProblem, kSolution, kPersonalized},
        "Role-play as the user described by the profile below. Judge explanations from that "
        "user's point of view: their skills, background and interests.",
        "As this user, evaluate whether the personalized explanation fits your programming "
        "skills and background. If you are not satisfied, give concrete revision "
        "suggestions. The final line must be RATING: <integer 1-10>",
        "Your previous reply did not end with a valid rating line. Reply again and make the "
        "final line exactly RATING: <integer 1-10> with nothing after it."}},
      {PromptKind::kJudgeCompare,
       {"judge_compare",
        {kProfile, kProblem, kSolution, kCandidateA, kCandidateB},
        "Role-play as the user described by the profile below. Judge explanations from that "
        "user's point of view: their skills, background and interests.",
        "As this user, decide which explanation suits you better. The final line must be "
        "WINNER: A|B",
        "Your previous reply did not end with a valid verdict line. Reply again and make the "
        "final line exactly WINNER: A or WINNER: B with nothing after it."}},
      {PromptKind::kSolveFromExplanation,
       {"solve_from_explanation",
        {kProblem, kExplanation},
        "You are a competitive programmer. You implement solutions in Python 3 that read "
        "standard input and write standard output.",
        "Implement a complete program that solves the problem, guided by the explanation. "
        "Reply with exactly one fenced code block containing the whole program.",
        ""}},
      {PromptKind::kBaselineExplanation,
       {"baseline_explanation",
        {kProblem, kSolution},
        "You are an expert competitive programmer who explains accepted solutions.",
        "Explain the accepted solution. First walk through the code step by step, then give "
        "a high-level understanding of the approach. Use exactly two labeled parts:\n"
        "STEP-BY-STEP:\n<sequential explanation>\nHIGH-LEVEL:\n<overall idea>",
        ""}},
      {PromptKind::kSelectExplanation,
       {"select_explanation",
        {kProblem, kSolution, kCandidates},
        "You are an expert competitive programmer who reviews explanations of accepted "
        "solutions.",
        "Rank the candidate explanations by faithfulness to the accepted solution, "
        "completeness and clarity. The final line must be SELECTED: <number of the best "
        "candidate>",
        "Your previous reply did not end with a valid selection line. Reply again and make "
        "the final line exactly SELECTED: <number>."}},
  };
  return templates.at(kind);
}

}  // namespace

std::string to_string(PromptKind kind) { return lookup(kind).name; }

const std::vector<std::string>& required_fields(PromptKind kind) { return lookup(kind).fields; }

std::vector<ChatMessage> render(PromptKind kind, const PromptContext& context, bool strict) {
  const Template& t = lookup(kind);
  for (const auto& [key, value] : context) {
    if (std::find(t.fields.begin(), t.fields.end(), key) == t.fields.end()) {
      throw UnexpectedField(t.name, key);
    }
  }
  std::vector<Segment> segments;
  for (const auto& key : t.fields) {
    auto it = context.find(key);
    if (it == context.end()) throw MissingField(t.name, key);
    segments.push_back({field_labels().at(key), it->second});
  }
  std::string task = t.task;
  if (strict && *t.strict) {
    task += "\n";
    task += t.strict;
  }
  segments.push_back({"TASK", std::move(task)});
  return {{Role::kSystem, t.system}, {Role::kUser, compose(segments)}};
}

std::string format_explanation(const Explanation& e) {
  return fmt::format("STEP-BY-STEP:\n{}\n\nHIGH-LEVEL:\n{}", e.step_by_step, e.high_level);
}

std::string format_reflection(const ProblemReflection& pr) {
  const bool structured = !(pr.goals.empty() && pr.inputs.empty() && pr.outputs.empty() &&
                            pr.conditions.empty() && pr.other.empty());
  if (!structured) return pr.raw;
  return fmt::format("GOALS: {}\nINPUTS: {}\nOUTPUTS: {}\nCONDITIONS: {}\nOTHER: {}", pr.goals,
                     pr.inputs, pr.outputs, pr.conditions, pr.other);
}

std::string format_profile(const UserProfile& up) {
  const bool structured =
      !(up.programming_languages.empty() && up.skill_level.empty() &&
        up.topics_of_interest.empty() && up.problem_solving_approach.empty() &&
        up.experience.empty() && up.other.empty());
  if (!structured) return up.raw;
  return fmt::format(
      "PROGRAMMING LANGUAGES: {}\nSKILL LEVEL: {}\nTOPICS OF INTEREST: {}\n"
      "PROBLEM-SOLVING APPROACH: {}\nEXPERIENCE: {}\nOTHER: {}",
      up.programming_languages, up.skill_level, up.topics_of_interest,
      up.problem_solving_approach, up.experience, up.other);
}

std::string format_history(const std::vector<UserInquiry>& h) {
  std::string out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::string tags;
    for (const auto& tag : h[i].tags) {
      if (!tags.empty()) tags += ", ";
      tags += tag;
    }
    if (i) out += "\n\n";
    out += fmt::format("Inquiry {} (posted {})\nTitle: {}\nTags: {}\nBody:\n{}", i + 1,
                       h[i].posted_at, h[i].title, tags, h[i].body);
  }
  return out;
}

std::string format_rating(const JudgeRating& r) {
  return fmt::format("Score: {}/10\nSuggestions:\n{}", r.score, r.suggestions);
}

std::string format_execution(const std::vector<TestCase>& tests, const ExecutionReport& report) {
  std::string out = fmt::format("Passed {} of {} tests.", report.accepted_count(),
                                report.per_test.size());
  for (std::size_t i = 0; i < report.per_test.size(); ++i) {
    const auto& result = report.per_test[i];
    out += fmt::format("\n\nTest {}: {}", i + 1, to_string(result.verdict));
    if (result.verdict == Verdict::kAccepted) continue;
    if (i < tests.size()) {
      out += fmt::format("\nInput:\n{}\nExpected output:\n{}", tests[i].input,
                         tests[i].expected_output);
    }
    out += fmt::format("\nActual output:\n{}", result.actual_output);
    if (!result.stderr_text.empty()) out += fmt::format("\nStderr:\n{}", result.stderr_text);
  }
  return out;
}

std::string format_candidates(const std::vector<std::string>& candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i) out += "\n\n";
    out += fmt::format("Candidate {}:\n{}", i + 1, candidates[i]);
  }
  return out;
}

}  // namespace critique_forge
