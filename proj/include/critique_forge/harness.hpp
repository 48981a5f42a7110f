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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critique_forge/metrics.hpp"
#include "critique_forge/session.hpp"
#include "critique_forge/types.hpp"

namespace critique_forge {

struct SolveRate {
  std::string problem_id;
  int n = 0;
  int c = 0;
  // k -> pass@k, for each requested k <= n.
  std::map<int, double> pass_at;
};

// Samples n = samples_per_problem programs from a prompt holding only the
// problem and the explanation, runs each on the scoring tests and counts
// the all-pass samples.
SolveRate solve_rate_for_problem(Session& session, const Explanation& e, const Problem& p,
                                 const std::vector<int>& ks = {1, 5});

// One pairwise comparison for the win-rate metric.
struct ComparisonUnit {
  std::string unit_id;
  UserProfile profile;
  std::string problem;
  std::string solution;
  std::string candidate_a;
  std::string candidate_b;
};

// 'A' or 'B' from the last "WINNER: X" line.
std::optional<char> parse_winner(std::string_view completion);

struct UnitComparison {
  double score = 0.5;
  bool flagged = false;
};

// Asks the judge twice with the candidates swapped: 1 if both orderings
// prefer candidate_a, 0 if both prefer candidate_b, 0.5 otherwise.
UnitComparison compare_unit(Session& session, const ComparisonUnit& unit);

struct WinRateResult {
  MetricReport report;
  std::vector<std::string> flagged_units;
};

WinRateResult win_rate(Session& session, const std::vector<ComparisonUnit>& units,
                       std::optional<std::size_t> expected_units = std::nullopt);

}  // namespace critique_forge
