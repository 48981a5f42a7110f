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

#include "critique_forge/config.hpp"
#include "critique_forge/corpus.hpp"
#include "critique_forge/io.hpp"
#include "critique_forge/runners.hpp"
#include "support.hpp"

using namespace cf_test;
using K = cf::PromptKind;
using nlohmann::json;

// Problems

TEST(Corpus, FixtureFilterAccounting) {
  auto loaded = cf::load_problems(fixture("corpus10.jsonl"), cf::Split::kValidation);
  const auto& r = loaded.report;
  EXPECT_EQ(r.input, 10u);
  EXPECT_EQ(r.kept, 6u);
  EXPECT_EQ(r.dropped.at(cf::drop_reason::kImage), 2u);
  EXPECT_EQ(r.dropped.at(cf::drop_reason::kNoTargetSolution), 2u);
  EXPECT_EQ(r.kept + r.dropped_total(), r.input);
  EXPECT_EQ(r.dropped_ids.at(cf::drop_reason::kImage),
            (std::vector<std::string>{"cf-002", "cf-005"}));
  EXPECT_EQ(loaded.corpus.problems.size(), 6u);
}

TEST(Corpus, ShortestSolutionRetainedWithTieBreak) {
  auto corpus = cf::load_problems(fixture("corpus10.jsonl"), cf::Split::kTest).corpus;
  EXPECT_EQ(corpus.split, cf::Split::kTest);
  const auto& multi = corpus.find("cf-003");
  ASSERT_EQ(multi.solutions.size(), 1u);
  EXPECT_EQ(multi.solutions[0].source, kSumSource);
  const auto& tie = corpus.find("cf-007");
  EXPECT_NE(tie.solutions[0].source.find("# a"), std::string::npos);
  EXPECT_EQ(corpus.find("cf-008").scoring_tests.size(), 1u);
  EXPECT_EQ(corpus.find("cf-001").scoring_tests.size(), 2u);
}

TEST(Corpus, LengthIsMeasuredInCodePoints) {
  const std::string line =
      R"({"id":"u","title":"t","description":"d","public_tests":[{"input":"","output":""}],)"
      R"("private_tests":[{"input":"","output":""}],"generated_tests":[],"solutions":[)"
      R"x({"language":"python3","source":"print('ééééé')"},{"language":"python3","source":"print('aaaaaa')"}]})x";
  auto corpus = cf::parse_problems(line + "\n", cf::Split::kValidation).corpus;
  EXPECT_EQ(corpus.find("u").solutions[0].source, "print('ééééé')");
}

TEST(Corpus, TestlessProblemsDropped) {
  const std::string no_public =
      R"({"id":"a","title":"t","description":"d","public_tests":[],"private_tests":[{"input":"","output":""}],)"
      R"("generated_tests":[],"solutions":[{"language":"python3","source":"x"}]})";
  const std::string no_scoring =
      R"({"id":"b","title":"t","description":"d","public_tests":[{"input":"","output":""}],"private_tests":[],)"
      R"("generated_tests":[],"solutions":[{"language":"python3","source":"x"}]})";
  auto loaded = cf::parse_problems(no_public + "\n" + no_scoring + "\n", cf::Split::kValidation);
  EXPECT_EQ(loaded.report.kept, 0u);
  EXPECT_EQ(loaded.report.dropped.at(cf::drop_reason::kNoPublicTests), 1u);
  EXPECT_EQ(loaded.report.dropped.at(cf::drop_reason::kNoScoringTests), 1u);
}

TEST(Corpus, MalformedLinesAndDuplicatesAreHardErrors) {
  const std::string good = cf::io::read_file(fixture("corpus10.jsonl"));
  try {
    cf::parse_problems(good + "{broken\n", cf::Split::kValidation);
    FAIL();
  } catch (const cf::CorpusError& e) {
    EXPECT_NE(std::string(e.what()).find(":11:"), std::string::npos) << e.what();
  }
  const auto first_line = good.substr(0, good.find('\n') + 1);
  EXPECT_THROW(cf::parse_problems(good + first_line, cf::Split::kValidation), cf::CorpusError);
}

TEST(Corpus, ConfigurableLanguageAndMarkers) {
  cf::IngestOptions options{.language_tag = "cpp", .image_markers = {"[figure]"}};
  auto loaded = cf::load_problems(fixture("corpus10.jsonl"), cf::Split::kValidation, options);
  EXPECT_EQ(loaded.report.kept, 2u);
  EXPECT_FALSE(loaded.report.dropped.count(cf::drop_reason::kImage));
}

TEST(Corpus, IngestionIsIdempotent) {
  auto first = cf::load_problems(fixture("corpus10.jsonl"), cf::Split::kValidation).corpus;
  auto again = cf::parse_problems(cf::corpus_to_jsonl(first), cf::Split::kValidation);
  EXPECT_EQ(again.report.kept, first.problems.size());
  EXPECT_EQ(cf::corpus_to_jsonl(again.corpus), cf::corpus_to_jsonl(first));
}

// Histories

TEST(Histories, GroupedSortedTruncated) {
  auto loaded = cf::load_histories(fixture("histories.jsonl"));
  ASSERT_EQ(loaded.histories.size(), 2u);
  EXPECT_EQ(loaded.histories[0].user_id, "alice");
  const auto& alice = loaded.find("alice").inquiries;
  ASSERT_EQ(alice.size(), 5u);
  EXPECT_EQ(alice[0].title, "Question 7 about pointers");
  EXPECT_EQ(alice[4].title, "Question 3 about pointers");
  const auto& bob = loaded.find("bob").inquiries;
  ASSERT_EQ(bob.size(), 3u);
  EXPECT_EQ(bob[0].title, "Python list question 0");
  EXPECT_EQ(bob[1].title, "Python list question 1");
  EXPECT_EQ(bob[2].title, "Python list question 2");
  EXPECT_THROW(loaded.find("carol"), cf::CorpusError);
}

TEST(Histories, MissingTimestampIsHardError) {
  try {
    cf::parse_histories("{\"user_id\":\"u\",\"title\":\"t\",\"tags\":[],\"body\":\"b\"}\n");
    FAIL();
  } catch (const cf::CorpusError& e) {
    EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos);
  }
}

TEST(Histories, Rfc3339Offsets) {
  EXPECT_EQ(cf::parse_rfc3339("2023-05-01T08:30:00+02:00"), cf::parse_rfc3339("2023-05-01T06:30:00Z"));
  EXPECT_LT(cf::parse_rfc3339("2023-05-01T06:30:00.5Z").time_since_epoch().count() -
                cf::parse_rfc3339("2023-05-01T06:30:00Z").time_since_epoch().count(),
            501);
  EXPECT_THROW(cf::parse_rfc3339("2023-05-01 06:30"), cf::CorpusError);
  EXPECT_THROW(cf::parse_rfc3339("2023-05-01T06:30:00"), cf::CorpusError);
}

// Config

TEST(Config, TomlOverlayAndUnknownKeys) {
  auto table = cf::parse_toml(
      "model = \"m\"  # comment\n[loop]\nmax_iterations = 2\n[presets.code]\ntemperature = 0.0\n"
      "[executor.languages]\nruby = [\"ruby\", \"{source}\"]\n[corpus]\nimage_markers = [\"<img>\"]\n");
  auto config = cf::apply_toml({}, table);
  EXPECT_EQ(config.model, "m");
  EXPECT_EQ(config.session.loop.max_iterations, 2);
  EXPECT_EQ(config.session.code_params.temperature, 0.0);
  EXPECT_DOUBLE_EQ(config.session.code_params.top_p, 0.1);
  EXPECT_EQ(config.interpreters.at("ruby").front(), "ruby");
  EXPECT_EQ(config.image_markers, std::vector<std::string>{"<img>"});
  EXPECT_THROW(cf::apply_toml({}, cf::parse_toml("mystery = 1\n")), cf::ConfigError);
  EXPECT_THROW(cf::parse_toml("key value\n"), cf::ConfigError);
  EXPECT_THROW(cf::apply_toml({}, cf::parse_toml("[loop]\nmax_iterations = 0\n")), cf::ConfigError);
}

// Runners

namespace {

std::shared_ptr<KindScript> selection_script(const std::string& verdict) {
  auto script = std::make_shared<KindScript>();
  for (int i = 1; i <= 4; ++i) {
    script->add(K::kBaselineExplanation, {"STEP-BY-STEP:\ncandidate " + std::to_string(i) + "\nHIGH-LEVEL:\nh"});
  }
  script->add(K::kSelectExplanation, {verdict});
  return script;
}

}  // namespace

TEST(Runners, BaselineIsOneCompletion) {
  auto script = std::make_shared<KindScript>();
  script->add(K::kBaselineExplanation, {kTwoPart});
  World w(script);
  auto p = toy_problem();
  auto e = cf::baseline_explanation(w.session, p, p.solutions.front());
  EXPECT_EQ(w.backend->calls(), 1u);
  EXPECT_EQ(e.high_level, "Direct arithmetic.");
}

TEST(Runners, SelfSelectionPicksRankedCandidate) {
  auto script = selection_script("Ranking...\nSELECTED: 3");
  World w(script);
  auto p = toy_problem();
  auto e = cf::self_selection_explanation(w.session, p, p.solutions.front());
  EXPECT_EQ(e.step_by_step, "candidate 3");
  EXPECT_EQ(w.backend->calls(), 5u);
  auto select = sections(w.prompts(K::kSelectExplanation).at(0));
  EXPECT_NE(select.at("CANDIDATE EXPLANATIONS").find("Candidate 4:"), std::string::npos);
}

TEST(Runners, UnparseableSelectionFallsBackToFirstAndFlags) {
  World w(selection_script("I like them all"));
  auto p = toy_problem();
  auto e = cf::self_selection_explanation(w.session, p, p.solutions.front());
  EXPECT_EQ(e.step_by_step, "candidate 1");
  EXPECT_EQ(w.record.find(cf::stage::kWarning).size(), 1u);
  EXPECT_EQ(cf::parse_selection("SELECTED: 9", 4), std::nullopt);
  EXPECT_EQ(cf::parse_selection("SELECTED: 2.", 4), 1u);
}

TEST(Runners, MethodNames) {
  for (auto m : {cf::Method::kBaseline, cf::Method::kSelfSelection, cf::Method::kSelfIteration}) {
    EXPECT_EQ(cf::method_from_string(cf::to_string(m)), m);
  }
  EXPECT_THROW(cf::method_from_string("greedy"), cf::ConfigError);
}

TEST(Runners, PipelineRecordsExactlyOneFinalOutput) {
  auto script = std::make_shared<KindScript>();
  script->add(K::kReflectProblem, {"GOALS: add"});
  script->add(K::kInitExplanation, {kTwoPart});
  script->add(K::kGenVerificationSolution, {fenced(kSumSource)});
  script->add(K::kExtractProfile, {"SKILL LEVEL: beginner"});
  script->add(K::kInitPersonalized, {"simple words"});
  script->add(K::kJudgeRating, {"RATING: 9"});
  World w(script, test_options(), "echo-sum", "alice");
  auto p = toy_problem();
  auto histories = cf::load_histories(fixture("histories.jsonl"));
  auto result = cf::run_pipeline(w.session, p, histories.find("alice"), cf::Method::kSelfIteration);
  EXPECT_TRUE(w.record.completed());
  EXPECT_TRUE(result.output.faithful.verified);
  ASSERT_TRUE(result.output.personalized);
  EXPECT_EQ(result.output.personalized->body, "simple words");
  EXPECT_LT(result.output.combined_text.find("Direct arithmetic."),
            result.output.combined_text.find("simple words"));
  auto doc = cf::final_output_document(result, p, "alice", cf::Method::kSelfIteration, 0);
  EXPECT_EQ(doc.at("problem_id"), "echo-sum");
  EXPECT_EQ(doc.at("solution"), p.solutions.front().source);
  EXPECT_EQ(doc.at("profile").at("skill_level"), "beginner");
}

TEST(Runners, BaselinePipelinePersonalizesOnce) {
  auto script = std::make_shared<KindScript>();
  script->add(K::kBaselineExplanation, {kTwoPart});
  script->add(K::kExtractProfile, {"SKILL LEVEL: expert"});
  script->add(K::kInitPersonalized, {"terse"});
  World w(script);
  auto p = toy_problem();
  cf::UserHistory h{"u", {{"t", {}, "b", "2023-01-01T00:00:00Z"}}};
  auto result = cf::run_pipeline(w.session, p, h, cf::Method::kBaseline);
  EXPECT_EQ(w.backend->calls(), 3u);
  EXPECT_EQ(result.output.personalized->body, "terse");
}

TEST(Runners, FailedPipelineLeavesFailedRecord) {
  World w(std::make_shared<KindScript>());
  EXPECT_THROW(cf::run_pipeline(w.session, toy_problem(), std::nullopt, cf::Method::kBaseline),
               cf::ScriptExhausted);
  EXPECT_TRUE(w.record.failed());
  EXPECT_FALSE(w.record.completed());
}
