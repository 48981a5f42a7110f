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

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "critique_forge/types.hpp"

namespace critique_forge {

enum class Split { kValidation, kTest };

std::string to_string(Split split);
Split split_from_string(const std::string& s);

struct Corpus {
  std::vector<Problem> problems;
  Split split = Split::kValidation;

  // Throws CorpusError for unknown ids.
  const Problem& find(const std::string& id) const;
};

struct IngestOptions {
  // Problems need at least one solution in this language.
  std::string language_tag = "python3";
  std::vector<std::string> image_markers{"<image>"};
};

namespace drop_reason {
inline constexpr const char* kImage = "image";
inline constexpr const char* kNoTargetSolution = "no_target_solution";
inline constexpr const char* kNoPublicTests = "no_public_tests";
inline constexpr const char* kNoScoringTests = "no_scoring_tests";
}  // namespace drop_reason

struct FilterReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::map<std::string, std::size_t> dropped;
  std::map<std::string, std::vector<std::string>> dropped_ids;

  std::size_t dropped_total() const;
};

struct LoadedCorpus {
  Corpus corpus;
  FilterReport report;
};

// Reads one problem per JSON line:
//   {id, title, description, public_tests:[{input,output}], private_tests,
//    generated_tests, solutions:[{language, source}]}
// Drops image problems, problems without a target-language solution, and
// problems without public or scoring tests; keeps only the shortest target
// solution (ties: smallest source). Malformed lines and duplicate ids throw
// CorpusError with the line number.
LoadedCorpus load_problems(const std::filesystem::path& path, Split split,
                           const IngestOptions& options = {});
LoadedCorpus parse_problems(std::string_view jsonl, Split split, const IngestOptions& options = {},
                            const std::string& source_name = "<memory>");

// Inverse of the problem line format, for kept problems.
nlohmann::json problem_to_json(const Problem& p);
std::string corpus_to_jsonl(const Corpus& corpus);

struct UserHistory {
  std::string user_id;
  // Most recent first, at most five.
  std::vector<UserInquiry> inquiries;
};

inline constexpr std::size_t kHistoryLength = 5;

struct LoadedHistories {
  std::vector<UserHistory> histories;
  std::vector<std::string> warnings;

  // Throws CorpusError for unknown users.
  const UserHistory& find(const std::string& user_id) const;
};

// Reads one inquiry per JSON line: {user_id, title, tags, body, posted_at}.
// Groups by user (first-appearance order), sorts newest first (stable on
// ties) and keeps five. A missing or unparseable posted_at throws
// CorpusError with the line number.
LoadedHistories load_histories(const std::filesystem::path& path);
LoadedHistories parse_histories(std::string_view jsonl, const std::string& source_name = "<memory>");

// RFC 3339 timestamp -> UTC milliseconds since the epoch.
std::chrono::sys_time<std::chrono::milliseconds> parse_rfc3339(std::string_view s);

}  // namespace critique_forge
