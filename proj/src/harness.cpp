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

#include "critique_forge/harness.hpp"

#include "critique_forge/error.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

SolveRate solve_rate_for_problem(Session& session, const Explanation& e, const Problem& p,
                                 const std::vector<int>& ks) {
  if (p.scoring_tests.empty()) throw ContractError("problem " + p.id + " has no scoring tests");
  SolveRate rate;
  rate.problem_id = p.id;
  rate.n = session.loop().samples_per_problem;
  const PromptContext context{{field::kProblem, p.description},
                              {field::kExplanation, format_explanation(e)}};
  for (int i = 0; i < rate.n; ++i) {
    auto completion = session.ask(PromptKind::kSolveFromExplanation, context, Preset::kCode);
    const std::string code = extract_code(completion.content);
    if (text::trim(code).empty()) continue;
    if (session.execute(code, p.scoring_tests, "scoring").all_passed) ++rate.c;
  }
  for (int k : ks) {
    if (k >= 1 && k <= rate.n) rate.pass_at[k] = pass_at_k(rate.n, rate.c, k);
  }
  session.note("solve_rate", json{{"problem_id", p.id},
                                  {"n", rate.n},
                                  {"c", rate.c},
                                  {"pass_at", rate.pass_at}});
  return rate;
}

std::optional<char> parse_winner(std::string_view completion) {
  auto lines = text::split_lines(completion);
  for (std::size_t i = lines.size(); i-- > 0;) {
    std::string_view line = text::trim(lines[i]);
    while (!line.empty() && (line.front() == '*' || line.front() == '#')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == '*' || line.back() == '.')) line.remove_suffix(1);
    line = text::trim(line);
    constexpr std::string_view kKey = "WINNER:";
    if (line.size() <= kKey.size()) continue;
    bool match = true;
    for (std::size_t j = 0; j < kKey.size(); ++j) {
      if (std::toupper(static_cast<unsigned char>(line[j])) != kKey[j]) match = false;
    }
    if (!match) continue;
    std::string_view verdict = text::trim(line.substr(kKey.size()));
    if (verdict == "A" || verdict == "a") return 'A';
    if (verdict == "B" || verdict == "b") return 'B';
    return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// Positional verdict for one ordering, with a single strict re-ask.
std::optional<char> ask_judge(Session& session, const ComparisonUnit& unit,
                              const std::string& first, const std::string& second) {
  const PromptContext context{{field::kProfile, format_profile(unit.profile)},
                              {field::kProblem, unit.problem},
                              {field::kSolution, unit.solution},
                              {field::kCandidateA, first},
                              {field::kCandidateB, second}};
  for (bool strict : {false, true}) {
    auto completion = session.ask(PromptKind::kJudgeCompare, context, Preset::kText,
                                  ModelRole::kJudge, strict);
    if (auto winner = parse_winner(completion.content)) return winner;
  }
  return std::nullopt;
}

}  // namespace

UnitComparison compare_unit(Session& session, const ComparisonUnit& unit) {
  const auto forward = ask_judge(session, unit, unit.candidate_a, unit.candidate_b);
  const auto swapped = ask_judge(session, unit, unit.candidate_b, unit.candidate_a);
  if (!forward || !swapped) return {.score = 0.5, .flagged = true};
  const bool a_first_wins = *forward == 'A';
  const bool a_second_wins = *swapped == 'B';
  if (a_first_wins && a_second_wins) return {.score = 1.0, .flagged = false};
  if (!a_first_wins && !a_second_wins) return {.score = 0.0, .flagged = false};
  return {.score = 0.5, .flagged = false};
}

WinRateResult win_rate(Session& session, const std::vector<ComparisonUnit>& units,
                       std::optional<std::size_t> expected_units) {
  WinRateResult result;
  std::vector<UnitValue> values;
  for (const auto& unit : units) {
    auto outcome = compare_unit(session, unit);
    if (outcome.flagged) result.flagged_units.push_back(unit.unit_id);
    values.push_back({unit.unit_id, outcome.score});
  }
  result.report = aggregate(Metric::kWinRate, std::move(values), expected_units, "win_rate");
  for (const auto& id : result.flagged_units) {
    result.report.warnings.push_back("unit " + id + ": unparseable verdict, scored 0.5");
  }
  return result;
}

}  // namespace critique_forge
