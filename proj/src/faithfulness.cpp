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

#include "critique_forge/faithfulness.hpp"

#include "critique_forge/error.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

ProblemReflection parse_reflection(std::string_view completion) {
  auto sections = text::extract_sections(completion, kReflectionHeadings);
  auto get = [&](const char* key) {
    auto it = sections.find(key);
    return it == sections.end() ? std::string() : it->second;
  };
  return {.goals = get("GOALS"),
          .inputs = get("INPUTS"),
          .outputs = get("OUTPUTS"),
          .conditions = get("CONDITIONS"),
          .other = get("OTHER"),
          .raw = std::string(completion)};
}

Explanation parse_explanation(std::string_view completion, int iteration) {
  auto sections = text::extract_sections(completion, kExplanationHeadings);
  Explanation e;
  e.iteration = iteration;
  if (sections.empty()) {
    e.step_by_step = std::string(text::trim(completion));
    return e;
  }
  if (auto it = sections.find("STEP-BY-STEP"); it != sections.end()) e.step_by_step = it->second;
  if (auto it = sections.find("HIGH-LEVEL"); it != sections.end()) e.high_level = it->second;
  return e;
}

FaithfulnessLoop::FaithfulnessLoop(Session& session, KeyedCache<ProblemReflection>* reflections)
    : session_(session), reflections_(reflections) {}

ProblemReflection FaithfulnessLoop::reflect(const Problem& p) {
  auto compute = [&] {
    auto completion =
        session_.ask(PromptKind::kReflectProblem, {{field::kProblem, p.description}}, Preset::kText);
    return parse_reflection(completion.content);
  };
  if (reflections_) return reflections_->get_or_compute(p.id, compute);
  return compute();
}

Explanation FaithfulnessLoop::init_explanation(const Problem& p, const Solution& s,
                                               const ProblemReflection& pr) {
  auto completion = session_.ask(PromptKind::kInitExplanation,
                                 {{field::kProblem, p.description},
                                  {field::kSolution, s.source},
                                  {field::kReflection, format_reflection(pr)}},
                                 Preset::kText);
  return parse_explanation(completion.content, 0);
}

VerificationAttempt FaithfulnessLoop::verify(const Problem& p, const Explanation& e) {
  auto completion = session_.ask(
      PromptKind::kGenVerificationSolution,
      {{field::kProblem, p.description}, {field::kCurrentExplanation, format_explanation(e)}},
      Preset::kCode);
  VerificationAttempt attempt;
  attempt.iteration = e.iteration;
  attempt.verification_source = extract_code(completion.content);
  if (text::trim(attempt.verification_source).empty()) {
    std::vector<TestResult> results(p.public_tests.size());
    for (auto& r : results) {
      r.verdict = Verdict::kRuntimeError;
      r.stderr_text = "no verification code could be extracted from the completion";
    }
    attempt.report = ExecutionReport::from(std::move(results));
    return attempt;
  }
  attempt.report = session_.execute(attempt.verification_source, p.public_tests, "verification");
  return attempt;
}

std::string FaithfulnessLoop::analyze_failure(const Problem& p, const Solution& s,
                                              const ProblemReflection& pr,
                                              const std::string& verification_source,
                                              const ExecutionReport& report) {
  if (report.all_passed) {
    throw ContractError("analyze_failure called on a passing verification report");
  }
  auto completion = session_.ask(PromptKind::kAnalyzeFailure,
                                 {{field::kProblem, p.description},
                                  {field::kSolution, s.source},
                                  {field::kReflection, format_reflection(pr)},
                                  {field::kVerificationSource, verification_source},
                                  {field::kExecutorOutput, format_execution(p.public_tests, report)}},
                                 Preset::kText);
  return completion.content;
}

Explanation FaithfulnessLoop::revise_explanation(const Problem& p, const Solution& s,
                                                 const ProblemReflection& pr,
                                                 const Explanation& e,
                                                 const VerificationAttempt& attempt) {
  if (!attempt.analysis) throw ContractError("revise_explanation needs a failure analysis");
  auto completion = session_.ask(
      PromptKind::kReviseExplanation,
      {{field::kProblem, p.description},
       {field::kSolution, s.source},
       {field::kReflection, format_reflection(pr)},
       {field::kCurrentExplanation, format_explanation(e)},
       {field::kVerificationSource, attempt.verification_source},
       {field::kExecutorOutput, format_execution(p.public_tests, attempt.report)},
       {field::kAnalysis, *attempt.analysis}},
      Preset::kText);
  return parse_explanation(completion.content, e.iteration + 1);
}

FaithfulnessResult FaithfulnessLoop::run(const Problem& p, const Solution& s) {
  if (p.public_tests.empty()) throw ContractError("problem " + p.id + " has no public tests");
  const int max_iterations = session_.loop().max_iterations;
  FaithfulnessResult result;
  try {
    result.reflection = reflect(p);
    Explanation e = init_explanation(p, s, result.reflection);
    while (true) {
      VerificationAttempt attempt = verify(p, e);
      const bool passed = attempt.report.all_passed;
      const bool budget_left = e.iteration + 1 < max_iterations;
      if (!passed && budget_left) {
        attempt.analysis = analyze_failure(p, s, result.reflection, attempt.verification_source,
                                           attempt.report);
      }
      session_.note(stage::kVerification, json(attempt));
      result.attempts.push_back(attempt);
      if (passed) {
        e.verified = true;
        break;
      }
      if (!budget_left) break;
      e = revise_explanation(p, s, result.reflection, e, attempt);
    }
    result.final = e;
  } catch (const Error& error) {
    session_.note(stage::kRunFailed, json{{"loop", "faithfulness"}, {"error", error.what()}});
    throw;
  }

  for (std::size_t i = 1; i < result.attempts.size(); ++i) {
    if (result.attempts[i].report.accepted_count() >
        result.attempts[result.best_attempt].report.accepted_count()) {
      result.best_attempt = static_cast<int>(i);
    }
  }
  session_.note(stage::kFaithfulnessSummary,
                json{{"attempts", result.attempts.size()},
                     {"final_iteration", result.final.iteration},
                     {"verified", result.final.verified},
                     {"best_attempt", result.best_attempt}});
  return result;
}

}  // namespace critique_forge
