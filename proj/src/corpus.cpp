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

#include "critique_forge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <fmt/format.h>

#include "critique_forge/error.hpp"
#include "critique_forge/io.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

std::string to_string(Split split) { return split == Split::kValidation ? "validation" : "test"; }

Split split_from_string(const std::string& s) {
  if (s == "validation" || s == "valid") return Split::kValidation;
  if (s == "test") return Split::kTest;
  throw CorpusError("unknown split: " + s);
}

const Problem& Corpus::find(const std::string& id) const {
  for (const auto& p : problems) {
    if (p.id == id) return p;
  }
  throw CorpusError("no problem with id '" + id + "' in corpus");
}

std::size_t FilterReport::dropped_total() const {
  std::size_t total = 0;
  for (const auto& [reason, count] : dropped) total += count;
  return total;
}

namespace {

std::vector<TestCase> read_tests(const json& j, const char* key, TestKind kind) {
  std::vector<TestCase> tests;
  if (!j.contains(key) || j.at(key).is_null()) return tests;
  for (const auto& t : j.at(key)) {
    tests.push_back({.input = t.at("input").get<std::string>(),
                     .expected_output = t.at("output").get<std::string>(),
                     .kind = kind});
  }
  return tests;
}

}  // namespace

LoadedCorpus parse_problems(std::string_view jsonl, Split split, const IngestOptions& options,
                            const std::string& source_name) {
  LoadedCorpus loaded;
  loaded.corpus.split = split;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  auto drop = [&](const char* reason, const std::string& id) {
    ++loaded.report.dropped[reason];
    loaded.report.dropped_ids[reason].push_back(id);
  };

  for (auto line : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++loaded.report.input;
    Problem p;
    std::vector<Solution> solutions;
    try {
      const json j = json::parse(line);
      p.id = j.at("id").get<std::string>();
      p.title = j.value("title", "");
      p.description = j.at("description").get<std::string>();
      p.public_tests = read_tests(j, "public_tests", TestKind::kPublic);
      p.scoring_tests = read_tests(j, "private_tests", TestKind::kPrivate);
      auto generated = read_tests(j, "generated_tests", TestKind::kGenerated);
      p.scoring_tests.insert(p.scoring_tests.end(), generated.begin(), generated.end());
      for (const auto& s : j.value("solutions", json::array())) {
        auto source = s.at("source").get<std::string>();
        if (source.empty()) continue;
        solutions.push_back(
            Solution::make(s.at("language").get<std::string>(), std::move(source)));
      }
    } catch (const json::exception& ex) {
      throw CorpusError(fmt::format("{}:{}: malformed problem: {}", source_name, line_no,
                                    ex.what()));
    }
    if (p.id.empty()) {
      throw CorpusError(fmt::format("{}:{}: problem id is empty", source_name, line_no));
    }
    if (!ids.insert(p.id).second) {
      throw CorpusError(
          fmt::format("{}:{}: duplicate problem id '{}'", source_name, line_no, p.id));
    }

    const bool has_image =
        std::any_of(options.image_markers.begin(), options.image_markers.end(),
                    [&](const std::string& m) { return p.description.find(m) != std::string::npos; });
    if (has_image) {
      drop(drop_reason::kImage, p.id);
      continue;
    }
    std::vector<Solution> target;
    for (auto& s : solutions) {
      if (s.language_tag == options.language_tag) target.push_back(std::move(s));
    }
    if (target.empty()) {
      drop(drop_reason::kNoTargetSolution, p.id);
      continue;
    }
    if (p.public_tests.empty()) {
      drop(drop_reason::kNoPublicTests, p.id);
      continue;
    }
    if (p.scoring_tests.empty()) {
      drop(drop_reason::kNoScoringTests, p.id);
      continue;
    }
    auto shortest = std::min_element(target.begin(), target.end(), [](const auto& a, const auto& b) {
      return std::tie(a.char_length, a.source) < std::tie(b.char_length, b.source);
    });
    p.solutions = {std::move(*shortest)};
    loaded.corpus.problems.push_back(std::move(p));
  }
  loaded.report.kept = loaded.corpus.problems.size();
  return loaded;
}

LoadedCorpus load_problems(const std::filesystem::path& path, Split split,
                           const IngestOptions& options) {
  return parse_problems(io::read_file(path), split, options, path.string());
}

json problem_to_json(const Problem& p) {
  json pub = json::array(), priv = json::array(), gen = json::array();
  for (const auto& t : p.public_tests) pub.push_back({{"input", t.input}, {"output", t.expected_output}});
  for (const auto& t : p.scoring_tests) {
    json row{{"input", t.input}, {"output", t.expected_output}};
    (t.kind == TestKind::kGenerated ? gen : priv).push_back(std::move(row));
  }
  json sols = json::array();
  for (const auto& s : p.solutions) sols.push_back(s);
  return json{{"id", p.id},
              {"title", p.title},
              {"description", p.description},
              {"public_tests", std::move(pub)},
              {"private_tests", std::move(priv)},
              {"generated_tests", std::move(gen)},
              {"solutions", std::move(sols)}};
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus.problems) out += problem_to_json(p).dump() + "\n";
  return out;
}

namespace {

int parse_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  if (pos + len > s.size()) throw CorpusError("truncated timestamp: " + std::string(whole));
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc() || ptr != s.data() + pos + len) {
    throw CorpusError("bad timestamp: " + std::string(whole));
  }
  return value;
}

void expect(std::string_view s, std::size_t pos, std::string_view chars, std::string_view whole) {
  if (pos >= s.size() || chars.find(s[pos]) == std::string_view::npos) {
    throw CorpusError("bad timestamp: " + std::string(whole));
  }
}

}  // namespace

std::chrono::sys_time<std::chrono::milliseconds> parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  const std::string_view whole = s;
  s = text::trim(s);
  const int year = parse_int(s, 0, 4, whole);
  expect(s, 4, "-", whole);
  const int month = parse_int(s, 5, 2, whole);
  expect(s, 7, "-", whole);
  const int day = parse_int(s, 8, 2, whole);
  expect(s, 10, "Tt ", whole);
  const int hour = parse_int(s, 11, 2, whole);
  expect(s, 13, ":", whole);
  const int minute = parse_int(s, 14, 2, whole);
  expect(s, 16, ":", whole);
  const int second = parse_int(s, 17, 2, whole);
  std::size_t pos = 19;
  int millis = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      if (digits < 3) millis = millis * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw CorpusError("bad timestamp: " + std::string(whole));
    for (int d = digits; d < 3; ++d) millis *= 10;
  }
  int offset_minutes = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    const int sign = s[pos] == '-' ? -1 : 1;
    const int oh = parse_int(s, pos + 1, 2, whole);
    expect(s, pos + 3, ":", whole);
    const int om = parse_int(s, pos + 4, 2, whole);
    offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  } else {
    throw CorpusError("timestamp lacks a UTC offset: " + std::string(whole));
  }
  if (pos != s.size()) throw CorpusError("trailing characters in timestamp: " + std::string(whole));

  const year_month_day ymd{std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                           std::chrono::day(static_cast<unsigned>(day))};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
    throw CorpusError("timestamp out of range: " + std::string(whole));
  }
  return sys_days(ymd) + hours(hour) + minutes(minute) + seconds(second) + milliseconds(millis) -
         minutes(offset_minutes);
}

const UserHistory& LoadedHistories::find(const std::string& user_id) const {
  for (const auto& h : histories) {
    if (h.user_id == user_id) return h;
  }
  throw CorpusError("no history for user '" + user_id + "'");
}

LoadedHistories parse_histories(std::string_view jsonl, const std::string& source_name) {
  struct Row {
    UserInquiry inquiry;
    std::chrono::sys_time<std::chrono::milliseconds> when;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<Row>> by_user;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    Row row;
    std::string user;
    try {
      const json j = json::parse(line);
      user = j.at("user_id").is_string() ? j.at("user_id").get<std::string>()
                                         : j.at("user_id").dump();
      if (!j.contains("posted_at") || !j.at("posted_at").is_string()) {
        throw CorpusError(fmt::format("{}:{}: inquiry lacks posted_at", source_name, line_no));
      }
      row.inquiry.title = j.value("title", "");
      row.inquiry.tags = j.value("tags", std::vector<std::string>{});
      row.inquiry.body = j.value("body", "");
      row.inquiry.posted_at = j.at("posted_at").get<std::string>();
    } catch (const json::exception& ex) {
      throw CorpusError(fmt::format("{}:{}: malformed inquiry: {}", source_name, line_no, ex.what()));
    }
    try {
      row.when = parse_rfc3339(row.inquiry.posted_at);
    } catch (const CorpusError& ex) {
      throw CorpusError(fmt::format("{}:{}: {}", source_name, line_no, ex.what()));
    }
    if (!by_user.count(user)) order.push_back(user);
    by_user[user].push_back(std::move(row));
  }

  LoadedHistories loaded;
  for (const auto& user : order) {
    auto& rows = by_user[user];
    std::erase_if(rows, [](const Row& r) {
      return text::trim(r.inquiry.title).empty() && text::trim(r.inquiry.body).empty();
    });
    if (rows.empty()) {
      loaded.warnings.push_back("user " + user + " has no usable inquiries; dropped");
      continue;
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.when > b.when; });
    UserHistory history{.user_id = user, .inquiries = {}};
    for (std::size_t i = 0; i < rows.size() && i < kHistoryLength; ++i) {
      history.inquiries.push_back(std::move(rows[i].inquiry));
    }
    loaded.histories.push_back(std::move(history));
  }
  return loaded;
}

LoadedHistories load_histories(const std::filesystem::path& path) {
  return parse_histories(io::read_file(path), path.string());
}

}  // namespace critique_forge
