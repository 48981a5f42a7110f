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

#include <cmath>
#include <random>

#include "critique_forge/harness.hpp"
#include "critique_forge/metrics.hpp"
#include "critique_forge/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cf_test;
using K = cf::PromptKind;

// pass@k

TEST(PassAtK, Examples) {
  EXPECT_EQ(cf::pass_at_k(4, 0, 1), 0.0);
  EXPECT_EQ(cf::pass_at_k(4, 4, 1), 1.0);
  EXPECT_DOUBLE_EQ(cf::pass_at_k(4, 2, 1), 0.5);
  EXPECT_EQ(cf::pass_at_k(5, 3, 3), 1.0);
}

TEST(PassAtK, MatchesSubsetEnumeration) {
  for (int n = 1; n <= 6; ++n) {
    for (int c = 0; c <= n; ++c) {
      for (int k = 1; k <= n; ++k) {
        EXPECT_NEAR(cf::pass_at_k(n, c, k), cf_oracle::pass_at_k_enumerated(n, c, k), 1e-12)
            << n << " " << c << " " << k;
      }
    }
  }
}

TEST(PassAtK, MonotoneInCAndK) {
  for (int n = 1; n <= 10; ++n) {
    for (int c = 0; c <= n; ++c) {
      for (int k = 1; k <= n; ++k) {
        if (c < n) EXPECT_LE(cf::pass_at_k(n, c, k), cf::pass_at_k(n, c + 1, k));
        if (k < n) EXPECT_LE(cf::pass_at_k(n, c, k), cf::pass_at_k(n, c, k + 1));
      }
    }
  }
}

TEST(PassAtK, DomainErrors) {
  EXPECT_THROW(cf::pass_at_k(4, 2, 5), cf::DomainError);
  EXPECT_THROW(cf::pass_at_k(4, 5, 1), cf::DomainError);
  EXPECT_THROW(cf::pass_at_k(4, -1, 1), cf::DomainError);
  EXPECT_THROW(cf::pass_at_k(4, 1, 0), cf::DomainError);
}

// Rouge-L

TEST(RougeL, Examples) {
  auto same = cf::rouge_l({"a", "b"}, {"a", "b"});
  EXPECT_EQ(same.f, 1.0);
  EXPECT_EQ(cf::rouge_l({"a"}, {"b"}).f, 0.0);
  auto cat = cf::rouge_l({"the", "cat", "sat"}, {"the", "cat", "ran"});
  EXPECT_DOUBLE_EQ(cat.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(cat.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(cat.f, 2.0 / 3.0);
  auto empty = cf::rouge_l({}, {"x"});
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.f, 0.0);
}

TEST(RougeL, MatchesDynamicProgrammingOracle) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> len(0, 20), vocab_size(1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> word(0, vocab_size(rng) - 1);
    auto seq = [&] {
      std::vector<std::string> s(static_cast<std::size_t>(len(rng)));
      for (auto& t : s) t = "w" + std::to_string(word(rng));
      return s;
    };
    auto a = seq(), b = seq();
    auto got = cf::rouge_l(a, b);
    auto want = cf_oracle::rouge_l_reference(a, b);
    EXPECT_NEAR(got.precision, want.p, 1e-12);
    EXPECT_NEAR(got.recall, want.r, 1e-12);
    EXPECT_NEAR(got.f, want.f, 1e-12);
    EXPECT_EQ(cf::lcs_length(a, b), cf_oracle::lcs_dp(a, b));
    if (got.precision == got.recall) EXPECT_NEAR(got.f, got.precision, 1e-12);
  }
}

TEST(RougeL, OrderSensitive) {
  EXPECT_LT(cf::rouge_l({"a", "b", "c"}, {"c", "b", "a"}).f, 1.0);
}

// Word overlap

TEST(WordOverlap, Examples) {
  EXPECT_EQ(cf::word_overlap_ratio("sort the list", {"how to sort the list quickly"}), 1.0);
  EXPECT_EQ(cf::word_overlap_ratio("alpha beta", {"gamma"}), 0.0);
  EXPECT_EQ(cf::word_overlap_ratio("a b c d", {"a c", "x"}), 0.5);
  EXPECT_THROW(cf::word_overlap_ratio(" ,. ", {"a"}), cf::DomainError);
}

TEST(WordOverlap, OrderInvariantAndMatchesSetOracle) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> len(1, 15), word(0, 12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> g(static_cast<std::size_t>(len(rng))), q(static_cast<std::size_t>(len(rng)));
    for (auto& t : g) t = "t" + std::to_string(word(rng));
    for (auto& t : q) t = "t" + std::to_string(word(rng));
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& t : v) s += t + " ";
      return s;
    };
    const double base = cf::word_overlap_ratio(join(g), {join(q)});
    EXPECT_DOUBLE_EQ(base, cf_oracle::overlap_reference({g.begin(), g.end()}, {q.begin(), q.end()}));
    std::shuffle(g.begin(), g.end(), rng);
    std::shuffle(q.begin(), q.end(), rng);
    EXPECT_EQ(cf::word_overlap_ratio(join(g), {join(q)}), base);
  }
}

// Aggregation

TEST(Aggregate, IdenticalValuesAndHalves) {
  std::vector<cf::UnitValue> same, halves;
  for (int i = 0; i < 40; ++i) {
    same.push_back({std::to_string(i), 0.3});
    halves.push_back({std::to_string(i), i % 2 ? 1.0 : 0.0});
  }
  auto a = cf::aggregate(cf::Metric::kRougeL, same);
  EXPECT_DOUBLE_EQ(a.mean, 0.3);
  EXPECT_NEAR(a.std, 0.0, 1e-15);
  EXPECT_EQ(a.n_units, 40u);
  auto b = cf::aggregate(cf::Metric::kWinRate, halves);
  EXPECT_DOUBLE_EQ(b.mean, 0.5);
  EXPECT_NEAR(b.std, std::sqrt(10.0 / 39.0), 1e-12);
}

TEST(Aggregate, GapsWarnAndZeroUnitsThrow) {
  std::vector<cf::UnitValue> units;
  for (int i = 0; i < 39; ++i) units.push_back({std::to_string(i), 1.0});
  auto report = cf::aggregate(cf::Metric::kPassAtK, units, 40);
  EXPECT_EQ(report.n_units, 39u);
  EXPECT_EQ(report.warnings.size(), 1u);
  EXPECT_THROW(cf::aggregate(cf::Metric::kPassAtK, {}), cf::DomainError);
}

TEST(Aggregate, JsonAndTable) {
  auto report = cf::aggregate(cf::Metric::kPassAtK, {{"a", 0.25}, {"b", 0.75}}, std::nullopt, "x");
  nlohmann::json j = report;
  EXPECT_EQ(j.at("metric"), "pass_at_k");
  EXPECT_EQ(j.at("n_units"), 2);
  EXPECT_EQ(j.at("per_unit").size(), 2u);
  const auto table = cf::format_table({report});
  EXPECT_NE(table.find("50.00%"), std::string::npos);
}

// Solve rate

TEST(SolveRate, TwoOfFourPass) {
  auto script = std::make_shared<KindScript>();
  script->add(K::kSolveFromExplanation, {fenced(kSumSource), fenced(kWrongSource),
                                         fenced(kSumSource), "no code at all ```"});
  World w(script);
  const auto p = toy_problem();
  cf::Explanation e{.step_by_step = "add", .high_level = "sum"};
  auto rate = cf::solve_rate_for_problem(w.session, e, p);
  EXPECT_EQ(rate.n, 4);
  EXPECT_EQ(rate.c, 2);
  EXPECT_DOUBLE_EQ(rate.pass_at.at(1), 0.5);
  EXPECT_FALSE(rate.pass_at.count(5));
  for (const auto& prompt : w.prompts(K::kSolveFromExplanation)) {
    EXPECT_EQ(prompt[1].content.find(p.solutions.front().source), std::string::npos);
    auto secs = sections(prompt);
    EXPECT_EQ(secs.size(), 3u);
  }
  for (const auto* event : w.record.find(cf::stage::kExecution)) {
    EXPECT_EQ(event->payload.at("report").at("per_test").size(), p.scoring_tests.size());
  }
}

TEST(SolveRate, NonePass) {
  auto script = std::make_shared<KindScript>();
  script->on(K::kSolveFromExplanation, [](const auto&) { return fenced(kWrongSource); });
  World w(script);
  auto rate = cf::solve_rate_for_problem(w.session, {}, toy_problem());
  EXPECT_EQ(rate.pass_at.at(1), 0.0);
}

// Win rate

namespace {

cf::ComparisonUnit unit(const std::string& id, const std::string& a, const std::string& b) {
  return {.unit_id = id, .profile = {.skill_level = "beginner"}, .problem = "p", .solution = "s",
          .candidate_a = a, .candidate_b = b};
}

// Judge preferring the candidate whose text sorts first, whatever its position.
std::string content_judge(const cf::ChatRequest& r) {
  auto secs = sections(r.messages);
  return secs.at("EXPLANATION A") < secs.at("EXPLANATION B") ? "WINNER: A" : "WINNER: B";
}

double rate(std::vector<cf::ComparisonUnit> units, KindScript::Handler judge) {
  auto script = std::make_shared<KindScript>();
  script->on(K::kJudgeCompare, std::move(judge));
  World w(script);
  return cf::win_rate(w.session, units).report.mean;
}

std::vector<cf::ComparisonUnit> swap_all(std::vector<cf::ComparisonUnit> units) {
  for (auto& u : units) std::swap(u.candidate_a, u.candidate_b);
  return units;
}

}  // namespace

TEST(WinRate, PositionBiasedJudgeTies) {
  std::vector<cf::ComparisonUnit> units{unit("1", "x", "y"), unit("2", "q", "p")};
  EXPECT_EQ(rate(units, [](const auto&) { return std::string("WINNER: A"); }), 0.5);
}

TEST(WinRate, ContentPreferringJudgeIsUnanimous) {
  std::vector<cf::ComparisonUnit> units{unit("1", "aaa", "zzz"), unit("2", "b", "c")};
  EXPECT_EQ(rate(units, content_judge), 1.0);
  EXPECT_EQ(rate(swap_all(units), content_judge), 0.0);
}

TEST(WinRate, ComplementaryUnderSwap) {
  std::vector<cf::ComparisonUnit> units{unit("1", "aaa", "zzz"), unit("2", "m", "c"), unit("3", "k", "k2")};
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned salt = rng();
    auto judge = [salt](const cf::ChatRequest& r) {
      auto secs = sections(r.messages);
      const auto h = std::hash<std::string>{}(secs.at("EXPLANATION A") + "|" +
                                              secs.at("EXPLANATION B") + std::to_string(salt));
      return std::string(h % 2 ? "WINNER: A" : "WINNER: B");
    };
    EXPECT_EQ(rate(units, judge) + rate(swap_all(units), judge), 1.0);
  }
}

TEST(WinRate, UnparseableVerdictScoresHalfAndFlags) {
  auto script = std::make_shared<KindScript>();
  script->on(K::kJudgeCompare, [](const auto&) { return std::string("I cannot decide"); });
  World w(script);
  auto result = cf::win_rate(w.session, {unit("1", "a", "b")});
  EXPECT_EQ(result.report.mean, 0.5);
  EXPECT_EQ(result.flagged_units, std::vector<std::string>{"1"});
  EXPECT_EQ(script->count(K::kJudgeCompare), 4);
}

TEST(WinRate, ParseWinner) {
  EXPECT_EQ(cf::parse_winner("reasoning\nWINNER: B"), 'B');
  EXPECT_EQ(cf::parse_winner("**Winner: a**"), 'A');
  EXPECT_FALSE(cf::parse_winner("WINNER: C"));
  EXPECT_FALSE(cf::parse_winner("nothing"));
}
