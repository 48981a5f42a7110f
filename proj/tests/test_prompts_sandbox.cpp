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

#include <gtest/gtest.h>

#include <chrono>

#include "support.hpp"

using namespace cf_test;

// Prompts

TEST(Prompts, ContextValuesAppearVerbatim) {
  auto messages = cf::render(cf::PromptKind::kReflectProblem, {{cf::field::kProblem, "Sum two ints"}});
  ASSERT_EQ(messages.size(), 2u);
  EXPECT_EQ(messages[0].role, cf::Role::kSystem);
  EXPECT_NE(messages[1].content.find("Sum two ints"), std::string::npos);
}

TEST(Prompts, MissingAndUnexpectedFields) {
  EXPECT_THROW(cf::render(cf::PromptKind::kInitExplanation,
                          {{cf::field::kProblem, "p"}, {cf::field::kSolution, "s"}}),
               cf::MissingField);
  EXPECT_THROW(cf::render(cf::PromptKind::kGenVerificationSolution,
                          {{cf::field::kProblem, "p"},
                           {cf::field::kCurrentExplanation, "e"},
                           {cf::field::kSolution, "s"}}),
               cf::UnexpectedField);
}

TEST(Prompts, RequiredFieldSetsMatchConditioningInputs) {
  using K = cf::PromptKind;
  auto set = [](K k) {
    auto v = cf::required_fields(k);
    return std::set<std::string>(v.begin(), v.end());
  };
  using S = std::set<std::string>;
  EXPECT_EQ(set(K::kReflectProblem), (S{"p"}));
  EXPECT_EQ(set(K::kInitExplanation), (S{"p", "s", "pr"}));
  EXPECT_EQ(set(K::kReviseExplanation), (S{"p", "s", "pr", "e_i", "vs_i", "eo_i", "a_i"}));
  EXPECT_EQ(set(K::kGenVerificationSolution), (S{"p", "e_i"}));
  EXPECT_EQ(set(K::kAnalyzeFailure), (S{"p", "s", "pr", "vs_i", "eo_i"}));
  EXPECT_EQ(set(K::kExtractProfile), (S{"h"}));
  EXPECT_EQ(set(K::kInitPersonalized), (S{"p", "s", "up", "e"}));
  EXPECT_EQ(set(K::kRevisePersonalized), (S{"p", "s", "e", "up", "pe_i", "r_i"}));
  EXPECT_EQ(set(K::kJudgeRating), (S{"up", "p", "s", "pe_i"}));
  EXPECT_EQ(set(K::kJudgeCompare), (S{"up", "p", "s", "pe_A", "pe_B"}));
  EXPECT_EQ(set(K::kSolveFromExplanation), (S{"p", "e"}));
}

TEST(Prompts, EveryKindRendersEveryValueVerbatimAndDeterministically) {
  for (auto kind : all_kinds()) {
    cf::PromptContext ctx;
    for (const auto& f : cf::required_fields(kind)) ctx[f] = "value-of-" + f + "\nline two";
    auto first = cf::render(kind, ctx);
    EXPECT_EQ(first, cf::render(kind, ctx));
    for (const auto& [key, value] : ctx) {
      EXPECT_NE(first[1].content.find(value), std::string::npos) << cf::to_string(kind);
    }
    EXPECT_EQ(kind_of(first), kind);
  }
}

TEST(Prompts, VerificationPromptNeverContainsTheOracleSolution) {
  const std::string oracle = "def secret_oracle(): return 42";
  auto messages = cf::render(cf::PromptKind::kGenVerificationSolution,
                             {{cf::field::kProblem, "Sum"}, {cf::field::kCurrentExplanation, "add"}});
  for (const auto& m : messages) EXPECT_EQ(m.content.find(oracle), std::string::npos);
  EXPECT_NE(messages[1].content.find("Sum"), std::string::npos);
  EXPECT_NE(messages[1].content.find("add"), std::string::npos);
}

TEST(Prompts, JudgeKindsDemandVerdictLinesAndRolePlay) {
  cf::PromptContext rating{{"up", "u"}, {"p", "p"}, {"s", "s"}, {"pe_i", "x"}};
  auto r = cf::render(cf::PromptKind::kJudgeRating, rating);
  EXPECT_NE(r[0].content.find("Role-play"), std::string::npos);
  EXPECT_NE(r[1].content.find("RATING: <integer 1-10>"), std::string::npos);
  auto strict = cf::render(cf::PromptKind::kJudgeRating, rating, true);
  EXPECT_GT(strict[1].content.size(), r[1].content.size());
  cf::PromptContext compare{{"up", "u"}, {"p", "p"}, {"s", "s"}, {"pe_A", "a"}, {"pe_B", "b"}};
  EXPECT_NE(cf::render(cf::PromptKind::kJudgeCompare, compare)[1].content.find("WINNER: A|B"),
            std::string::npos);
}

TEST(Prompts, ExecutionFormatShowsFailingDetails) {
  std::vector<cf::TestCase> tests{{"1 2\n", "3\n"}, {"5 5\n", "10\n"}};
  std::vector<cf::TestResult> results(2);
  results[1] = {cf::Verdict::kRuntimeError, "", "Traceback: boom", 3};
  auto text = cf::format_execution(tests, cf::ExecutionReport::from(results));
  EXPECT_NE(text.find("Passed 1 of 2"), std::string::npos);
  EXPECT_NE(text.find("5 5"), std::string::npos);
  EXPECT_NE(text.find("Traceback: boom"), std::string::npos);
  EXPECT_EQ(text.find("1 2"), std::string::npos);
}

TEST(Prompts, HistoryFormatCarriesTitleTagsBody) {
  std::vector<cf::UserInquiry> h{{"How to sort", {"python", "sorting"}, "my body", "2023-01-01T00:00:00Z"}};
  auto text = cf::format_history(h);
  for (auto needle : {"How to sort", "python, sorting", "my body"}) {
    EXPECT_NE(text.find(needle), std::string::npos);
  }
}

// Sandbox

namespace {

cf::ExecutionLimits limits(int timeout_ms = 5000, std::size_t max_bytes = 1 << 20) {
  return {.per_test_timeout_ms = timeout_ms, .max_output_bytes = max_bytes};
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_EQ(cf::normalize_output("a\r\nb\r\n"), "a\nb");
  EXPECT_EQ(cf::normalize_output("x  \n\n\n"), "x");
  EXPECT_EQ(cf::normalize_output(""), "");
  EXPECT_EQ(cf::normalize_output("5 \n\n"), cf::normalize_output("5\n"));
  EXPECT_EQ(cf::normalize_output("  lead\n\nmid\t\n"), "  lead\n\nmid");
}

TEST(Sandbox, EchoIsAccepted) {
  cf::Sandbox sandbox;
  auto report = sandbox.run_tests("import sys\nsys.stdout.write(sys.stdin.read())\n", "python3",
                                  {{"5\n", "5\n"}}, limits());
  EXPECT_TRUE(report.all_passed);
}

TEST(Sandbox, TrailingWhitespaceIsNormalized) {
  cf::Sandbox sandbox;
  auto report = sandbox.run_tests("print('5 ')\nprint()\n", "python3", {{"", "5\n"}}, limits());
  EXPECT_EQ(report.per_test.at(0).verdict, cf::Verdict::kAccepted);
}

TEST(Sandbox, ToyProblemVerdicts) {
  const auto p = toy_problem();
  cf::Sandbox sandbox;
  auto ok = sandbox.run_tests(kSumSource, "python3", p.public_tests, limits());
  EXPECT_TRUE(ok.all_passed);
  auto wrong = sandbox.run_tests(kWrongSource, "python3", p.public_tests, limits());
  ASSERT_EQ(wrong.per_test.size(), p.public_tests.size());
  for (const auto& r : wrong.per_test) EXPECT_EQ(r.verdict, cf::Verdict::kWrongAnswer);
}

TEST(Sandbox, InfiniteLoopTimesOut) {
  cf::Sandbox sandbox;
  const auto start = std::chrono::steady_clock::now();
  auto report = sandbox.run_tests("while True:\n    pass\n", "python3", {{"", ""}}, limits(1000));
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(report.per_test[0].verdict, cf::Verdict::kTimeout);
  EXPECT_GE(report.per_test[0].wall_time_ms, 1000);
  EXPECT_LT(elapsed, std::chrono::seconds(5));
}

TEST(Sandbox, ChildProcessesOfTimedOutProgramAreKilled) {
  cf::Sandbox sandbox;
  auto report = sandbox.run_tests("sleep 30 &\nwait\n", "sh", {{"", ""}}, limits(500));
  EXPECT_EQ(report.per_test[0].verdict, cf::Verdict::kTimeout);
}

TEST(Sandbox, RuntimeErrorsAndNoShortCircuit) {
  cf::Sandbox sandbox;
  auto report = sandbox.run_tests(
      "x = int(input())\nif x == 0:\n    raise SystemExit(3)\nprint(x)\n", "python3",
      {{"0\n", "0\n"}, {"7\n", "7\n"}, {"oops\n", "1\n"}}, limits());
  ASSERT_EQ(report.per_test.size(), 3u);
  EXPECT_EQ(report.per_test[0].verdict, cf::Verdict::kRuntimeError);
  EXPECT_EQ(report.per_test[1].verdict, cf::Verdict::kAccepted);
  EXPECT_EQ(report.per_test[2].verdict, cf::Verdict::kRuntimeError);
  EXPECT_NE(report.per_test[2].stderr_text.find("ValueError"), std::string::npos);
  EXPECT_EQ(report.per_test[2].stderr_text.find("critique-forge-"), std::string::npos);
  EXPECT_FALSE(report.all_passed);
}

TEST(Sandbox, OutputTruncationIsWrongAnswer) {
  cf::Sandbox sandbox;
  auto report = sandbox.run_tests("print('x' * 100000)\n", "python3", {{"", "x"}}, limits(5000, 1000));
  EXPECT_EQ(report.per_test[0].verdict, cf::Verdict::kWrongAnswer);
  EXPECT_LE(report.per_test[0].actual_output.size(), 1000u);
}

TEST(Sandbox, ErrorsAreDistinctFromVerdicts) {
  cf::Sandbox sandbox;
  EXPECT_THROW(sandbox.run_tests("x", "cobol", {{"", ""}}, limits()), cf::UnknownLanguage);
  EXPECT_THROW(sandbox.run_tests("x", "python3", {}, limits()), cf::ContractError);
  cf::Sandbox broken({{"ghost", {"/nonexistent/interpreter", "{source}"}}});
  EXPECT_THROW(broken.run_tests("x", "ghost", {{"", ""}}, limits()), cf::SandboxSpawnFailure);
}

TEST(Sandbox, DeterministicVerdicts) {
  cf::Sandbox sandbox;
  const auto p = toy_problem();
  auto a = sandbox.run_tests(kSumSource, "python3", p.scoring_tests, limits());
  auto b = sandbox.run_tests(kSumSource, "python3", p.scoring_tests, limits());
  for (std::size_t i = 0; i < a.per_test.size(); ++i) {
    EXPECT_EQ(a.per_test[i].verdict, b.per_test[i].verdict);
    EXPECT_EQ(a.per_test[i].actual_output, b.per_test[i].actual_output);
  }
}
