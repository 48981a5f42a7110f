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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace critique_forge {

// Stage names written into run records.
namespace stage {
inline constexpr const char* kRunStart = "run_start";
inline constexpr const char* kBackend = "backend";
inline constexpr const char* kPrompt = "prompt";
inline constexpr const char* kExecution = "execution";
inline constexpr const char* kVerification = "verification";
inline constexpr const char* kRating = "rating";
inline constexpr const char* kFaithfulnessSummary = "faithfulness_summary";
inline constexpr const char* kPersonalizationSummary = "personalization_summary";
inline constexpr const char* kFinalOutput = "final_output";
inline constexpr const char* kRunFailed = "run_failed";
inline constexpr const char* kWarning = "warning";
}  // namespace stage

struct RunEvent {
  std::uint64_t seq = 0;
  std::string stage;
  std::string timestamp;
  nlohmann::json payload;
  // Wall-clock measurements; excluded from determinism comparisons.
  nlohmann::json timings;
};

// Append-only trace of one pipeline run. Not thread-safe: one writer per run.
class RunRecord {
 public:
  using Clock = std::function<std::string()>;

  RunRecord(std::string run_id, std::string problem_id,
            std::optional<std::string> user_id, Clock clock = {});

  void append(std::string stage, nlohmann::json payload,
              nlohmann::json timings = nlohmann::json::object());

  const std::string& run_id() const { return run_id_; }
  const std::string& problem_id() const { return problem_id_; }
  const std::optional<std::string>& user_id() const { return user_id_; }
  const std::vector<RunEvent>& events() const { return events_; }

  std::vector<const RunEvent*> find(std::string_view stage) const;
  bool completed() const;
  bool failed() const;

  // One JSON object per line, in insertion order.
  std::string to_jsonl() const;
  // Same as to_jsonl() with timestamps and timings dropped.
  std::string payload_jsonl() const;

  void write(const std::filesystem::path& path) const;
  static RunRecord read(const std::filesystem::path& path);

 private:
  std::string run_id_;
  std::string problem_id_;
  std::optional<std::string> user_id_;
  Clock clock_;
  std::vector<RunEvent> events_;
};

// "<UTC yyyymmddThhmmss>-<8 hex chars>", hashed from seed and the current time.
std::string make_run_id(std::string_view seed);

}  // namespace critique_forge
