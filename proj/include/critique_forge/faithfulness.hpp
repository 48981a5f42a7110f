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

#include <string>
#include <string_view>
#include <vector>

#include "critique_forge/session.hpp"
#include "critique_forge/types.hpp"

namespace critique_forge {

// Splits a reflection completion into its five sections; raw always kept.
ProblemReflection parse_reflection(std::string_view completion);

// Splits an explanation completion on its two labeled parts. Without either
// label the whole completion becomes step_by_step.
Explanation parse_explanation(std::string_view completion, int iteration);

struct FaithfulnessResult {
  Explanation final;
  std::vector<VerificationAttempt> attempts;
  ProblemReflection reflection;
  // Attempt with the most Accepted verdicts (earliest on ties).
  int best_attempt = 0;
};

// Reflect once, then draft -> verify -> (analyze -> revise) until a
// verification solution written from the explanation alone passes every
// public test, or max_iterations explanations have been verified.
class FaithfulnessLoop {
 public:
  explicit FaithfulnessLoop(Session& session,
                            KeyedCache<ProblemReflection>* reflections = nullptr);

  ProblemReflection reflect(const Problem& p);
  Explanation init_explanation(const Problem& p, const Solution& s, const ProblemReflection& pr);
  // Generates vs_i from p and e_i only and runs it on p's public tests.
  VerificationAttempt verify(const Problem& p, const Explanation& e);
  // Throws ContractError when the report passed.
  std::string analyze_failure(const Problem& p, const Solution& s, const ProblemReflection& pr,
                              const std::string& verification_source,
                              const ExecutionReport& report);
  Explanation revise_explanation(const Problem& p, const Solution& s,
                                 const ProblemReflection& pr, const Explanation& e,
                                 const VerificationAttempt& attempt);

  FaithfulnessResult run(const Problem& p, const Solution& s);

 private:
  Session& session_;
  KeyedCache<ProblemReflection>* reflections_;
};

}  // namespace critique_forge
