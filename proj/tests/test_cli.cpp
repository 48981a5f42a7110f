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
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "critique_forge/io.hpp"
#include "support.hpp"

using namespace cf_test;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Output {
  int status = -1;
  std::string text;  // stdout and stderr interleaved
};

Output run_cli(const std::string& args) {
  const std::string command = std::string(CF_CLI_PATH) + " " + args + " 2>&1";
  Output out;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return out;
  char buffer[4096];
  while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe)) out.text.append(buffer, n);
  const int raw = ::pclose(pipe);
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("critique-forge-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string script(const std::string& name, const json& replies) {
    const auto path = dir_ / name;
    std::ofstream(path) << replies.dump();
    return path.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kProblems = "--problems " + fixture("toy.jsonl").string();

json pipeline_replies() {
  return json::array({"GOALS: sum", kTwoPart, fenced(kSumSource), "SKILL LEVEL: beginner",
                      "friendly draft", "RATING: 9"});
}

}  // namespace

TEST_F(CliTest, IngestValidateReportsDrops) {
  auto out = run_cli("ingest validate --problems " + fixture("corpus10.jsonl").string());
  ASSERT_EQ(out.status, 0) << out.text;
  const auto report = json::parse(out.text.substr(out.text.find('{')));
  EXPECT_EQ(report.at("problems").at("kept"), 6);
  EXPECT_EQ(report.at("problems").at("dropped").at("image"), 2);
}

TEST_F(CliTest, UsageErrorExitsOne) {
  EXPECT_EQ(run_cli("explain --no-such-flag").status, 1);
  EXPECT_EQ(run_cli("eval pass-at-k " + kProblems + " --k 0").status, 1);
}

TEST_F(CliTest, UnknownProblemExitsTwo) {
  auto s = script("s.json", json::array());
  EXPECT_EQ(run_cli("explain " + kProblems + " --problem-id nope --scripted " + s +
                    " --runs-dir " + path("runs")).status,
            2);
}

TEST_F(CliTest, MissingApiKeyIsAConfigError) {
  auto out = run_cli("explain " + kProblems + " --problem-id echo-sum --runs-dir " + path("runs") +
                     " </dev/null");
  if (std::getenv(critique_forge::kApiKeyEnv)) GTEST_SKIP() << "API key set in environment";
  EXPECT_EQ(out.status, 1) << out.text;
}

TEST_F(CliTest, ExplainWritesRecordAndFinalOutput) {
  auto s = script("s.json", json::array({"GOALS: sum", kTwoPart, fenced(kSumSource)}));
  auto out = run_cli("explain " + kProblems + " --problem-id echo-sum --scripted " + s +
                     " --runs-dir " + path("runs") + " --out " + path("final.json"));
  ASSERT_EQ(out.status, 0) << out.text;
  const auto doc = json::parse(critique_forge::io::read_file(path("final.json")));
  EXPECT_EQ(doc.at("problem_id"), "echo-sum");
  EXPECT_TRUE(doc.at("final").at("faithful").at("verified").get<bool>());
  EXPECT_TRUE(doc.at("user_id").is_null());
  const auto summary = json::parse(out.text.substr(out.text.rfind("{\"final\"")));
  EXPECT_TRUE(fs::exists(summary.at("record").get<std::string>()));
}

TEST_F(CliTest, PassAtKRaisesSamplesForLargeK) {
  json replies = json::array({kTwoPart});
  for (int i = 0; i < 5; ++i) replies.push_back(fenced(kSumSource));
  auto s = script("s.json", replies);
  auto out = run_cli("eval pass-at-k " + kProblems + " --problem-id echo-sum --method baseline --k 5 --samples 4 " +
                     "--parallel 1 --scripted " + s + " --runs-dir " + path("runs"));
  ASSERT_EQ(out.status, 0) << out.text;
  EXPECT_NE(out.text.find("raising samples to 5"), std::string::npos) << out.text;
  EXPECT_NE(out.text.find("100.00%"), std::string::npos) << out.text;
}

TEST_F(CliTest, RecordedPipelineReplaysByteIdentically) {
  auto s = script("s.json", pipeline_replies());
  const std::string common = "pipeline " + kProblems + " --problem-id echo-sum --histories " +
                             fixture("histories.jsonl").string() + " --user alice --runs-dir " + path("runs");
  auto recorded = run_cli(common + " --scripted " + s + " --record " + path("cassette.jsonl") +
                          " --out " + path("recorded.json"));
  ASSERT_EQ(recorded.status, 0) << recorded.text;
  auto first = run_cli(common + " --replay " + path("cassette.jsonl") + " --out " + path("a.json"));
  auto second = run_cli(common + " --replay " + path("cassette.jsonl") + " --out " + path("b.json"));
  ASSERT_EQ(first.status, 0) << first.text;
  ASSERT_EQ(second.status, 0) << second.text;
  const auto a = critique_forge::io::read_file(path("a.json"));
  EXPECT_EQ(a, critique_forge::io::read_file(path("b.json")));
  EXPECT_EQ(a, critique_forge::io::read_file(path("recorded.json")));
  EXPECT_EQ(json::parse(a).at("user_id"), "alice");
}

TEST_F(CliTest, ReplayMissIsARuntimeFailure) {
  std::ofstream(path("empty.jsonl")).close();
  auto out = run_cli("explain " + kProblems + " --problem-id echo-sum --replay " + path("empty.jsonl") +
                     " --runs-dir " + path("runs"));
  EXPECT_EQ(out.status, 2) << out.text;
}
