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

#include "critique_forge/run_record.hpp"

#include <chrono>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "critique_forge/error.hpp"
#include "critique_forge/io.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

RunRecord::RunRecord(std::string run_id, std::string problem_id,
                     std::optional<std::string> user_id, Clock clock)
    : run_id_(std::move(run_id)),
      problem_id_(std::move(problem_id)),
      user_id_(std::move(user_id)),
      clock_(clock ? std::move(clock) : Clock(&io::rfc3339_now)) {
  append(stage::kRunStart,
         json{{"problem_id", problem_id_},
              {"user_id", user_id_ ? json(*user_id_) : json(nullptr)}});
}

void RunRecord::append(std::string stage, json payload, json timings) {
  events_.push_back({.seq = events_.size(),
                     .stage = std::move(stage),
                     .timestamp = clock_(),
                     .payload = std::move(payload),
                     .timings = std::move(timings)});
}

std::vector<const RunEvent*> RunRecord::find(std::string_view stage) const {
  std::vector<const RunEvent*> out;
  for (const auto& e : events_) {
    if (e.stage == stage) out.push_back(&e);
  }
  return out;
}

bool RunRecord::completed() const { return find(stage::kFinalOutput).size() == 1; }

bool RunRecord::failed() const { return !find(stage::kRunFailed).empty(); }

namespace {

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace

std::string RunRecord::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    out += dump_line(json{{"seq", e.seq},
                          {"stage", e.stage},
                          {"timestamp", e.timestamp},
                          {"payload", e.payload},
                          {"timings", e.timings}});
  }
  return out;
}

std::string RunRecord::payload_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    out += dump_line(json{{"seq", e.seq}, {"stage", e.stage}, {"payload", e.payload}});
  }
  return out;
}

void RunRecord::write(const std::filesystem::path& path) const {
  io::write_file_atomic(path, to_jsonl());
}

RunRecord RunRecord::read(const std::filesystem::path& path) {
  const std::string content = io::read_file(path);
  std::vector<RunEvent> events;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      events.push_back({.seq = j.at("seq").get<std::uint64_t>(),
                        .stage = j.at("stage").get<std::string>(),
                        .timestamp = j.value("timestamp", ""),
                        .payload = j.at("payload"),
                        .timings = j.value("timings", json::object())});
    } catch (const json::exception& ex) {
      throw StorageError(fmt::format("{}:{}: {}", path.string(), line_no, ex.what()));
    }
  }
  if (events.empty() || events.front().stage != stage::kRunStart) {
    throw StorageError(path.string() + ": run record lacks a run_start event");
  }
  const json& start = events.front().payload;
  std::optional<std::string> user;
  if (!start.at("user_id").is_null()) user = start.at("user_id").get<std::string>();
  RunRecord record(path.stem().string(), start.at("problem_id").get<std::string>(), user);
  record.events_ = std::move(events);
  return record;
}

std::string make_run_id(std::string_view seed) {
  const auto now = std::chrono::system_clock::now();
  const auto salted = fmt::format("{}|{}", seed, now.time_since_epoch().count());
  return fmt::format("{:%Y%m%dT%H%M%S}-{}", std::chrono::floor<std::chrono::seconds>(now),
                     io::sha256_hex(salted).substr(0, 8));
}

}  // namespace critique_forge
