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

#include "critique_forge/personalization.hpp"

#include <charconv>

#include <fmt/format.h>

#include "critique_forge/error.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

UserProfile parse_profile(std::string_view completion) {
  auto sections = text::extract_sections(completion, kProfileHeadings);
  auto get = [&](const char* key) {
    auto it = sections.find(key);
    return it == sections.end() ? std::string() : it->second;
  };
  return {.programming_languages = get("PROGRAMMING LANGUAGES"),
          .skill_level = get("SKILL LEVEL"),
          .topics_of_interest = get("TOPICS OF INTEREST"),
          .problem_solving_approach = get("PROBLEM-SOLVING APPROACH"),
          .experience = get("EXPERIENCE"),
          .other = get("OTHER"),
          .raw = std::string(completion)};
}

namespace {

// Parses "RATING: n" (leading '*', '#' and blanks tolerated).
std::optional<int> rating_value(std::string_view line) {
  line = text::trim(line);
  while (!line.empty() && (line.front() == '*' || line.front() == '#')) line.remove_prefix(1);
  while (!line.empty() && line.back() == '*') line.remove_suffix(1);
  line = text::trim(line);
  constexpr std::string_view kKey = "RATING:";
  if (line.size() < kKey.size()) return std::nullopt;
  for (std::size_t i = 0; i < kKey.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(line[i])) != kKey[i]) return std::nullopt;
  }
  line = text::trim(line.substr(kKey.size()));
  while (!line.empty() && line.back() == '*') line.remove_suffix(1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
  if (ec != std::errc() || ptr == line.data()) return std::nullopt;
  std::string_view rest = text::trim(std::string_view(ptr, line.data() + line.size() - ptr));
  if (!rest.empty() && rest != "/10" && rest != "/ 10") return std::nullopt;
  return value;
}

}  // namespace

std::optional<JudgeRating> parse_rating(std::string_view completion, int threshold) {
  auto lines = text::split_lines(completion);
  for (std::size_t i = lines.size(); i-- > 0;) {
    auto value = rating_value(lines[i]);
    if (!value) continue;
    if (*value < 1 || *value > 10) return std::nullopt;
    std::string remainder;
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (j == i) continue;
      remainder += lines[j];
      remainder += '\n';
    }
    JudgeRating rating;
    rating.score = *value;
    rating.satisfied = *value >= threshold;
    rating.suggestions = std::string(text::trim(remainder));
    rating.raw = std::string(completion);
    if (!rating.satisfied && rating.suggestions.empty()) {
      rating.suggestions =
          fmt::format("(no suggestions given; rated {} below the threshold {})", *value, threshold);
    }
    return rating;
  }
  return std::nullopt;
}

PersonalizationLoop::PersonalizationLoop(Session& session, KeyedCache<UserProfile>* profiles)
    : session_(session), profiles_(profiles) {}

UserProfile PersonalizationLoop::extract_profile(const std::string& user_id,
                                                 const std::vector<UserInquiry>& h) {
  if (h.empty()) throw ContractError("cannot extract a profile from an empty history");
  auto compute = [&] {
    auto completion =
        session_.ask(PromptKind::kExtractProfile, {{field::kHistory, format_history(h)}},
                     Preset::kText);
    return parse_profile(completion.content);
  };
  if (profiles_) return profiles_->get_or_compute(user_id, compute);
  return compute();
}

PersonalizedExplanation PersonalizationLoop::init_personalized(const Problem& p,
                                                               const Solution& s,
                                                               const UserProfile& up,
                                                               const Explanation& e) {
  auto completion = session_.ask(PromptKind::kInitPersonalized,
                                 {{field::kProblem, p.description},
                                  {field::kSolution, s.source},
                                  {field::kProfile, format_profile(up)},
                                  {field::kExplanation, format_explanation(e)}},
                                 Preset::kText);
  return {.body = completion.content, .iteration = 0, .rating = std::nullopt};
}

JudgeRating PersonalizationLoop::judge(const UserProfile& up, const Problem& p,
                                       const Solution& s, const PersonalizedExplanation& pe) {
  const PromptContext context{{field::kProfile, format_profile(up)},
                              {field::kProblem, p.description},
                              {field::kSolution, s.source},
                              {field::kPersonalized, pe.body}};
  const int threshold = session_.loop().satisfaction_threshold;
  std::string last;
  for (bool strict : {false, true}) {
    auto completion =
        session_.ask(PromptKind::kJudgeRating, context, Preset::kText, ModelRole::kJudge, strict);
    if (auto rating = parse_rating(completion.content, threshold)) return *rating;
    last = completion.content;
  }
  session_.note(stage::kWarning, json{{"kind", "judge_rating"},
                                      {"message", "unparseable rating after re-ask; scored 1"}});
  JudgeRating fallback;
  fallback.score = 1;
  fallback.satisfied = 1 >= threshold;
  fallback.suggestions = last.empty() ? std::string("(empty judge reply)") : last;
  fallback.raw = last;
  fallback.parsed = false;
  return fallback;
}

PersonalizedExplanation PersonalizationLoop::revise_personalized(
    const Problem& p, const Solution& s, const Explanation& e, const UserProfile& up,
    const PersonalizedExplanation& pe, const JudgeRating& rating) {
  if (rating.satisfied) throw ContractError("revise_personalized called on a satisfied rating");
  auto completion = session_.ask(PromptKind::kRevisePersonalized,
                                 {{field::kProblem, p.description},
                                  {field::kSolution, s.source},
                                  {field::kExplanation, format_explanation(e)},
                                  {field::kProfile, format_profile(up)},
                                  {field::kPersonalized, pe.body},
                                  {field::kRating, format_rating(rating)}},
                                 Preset::kText);
  return {.body = completion.content, .iteration = pe.iteration + 1, .rating = std::nullopt};
}

PersonalizationResult PersonalizationLoop::run(const Problem& p, const Solution& s,
                                               const Explanation& e, const std::string& user_id,
                                               const std::vector<UserInquiry>& h) {
  const int max_iterations = session_.loop().max_iterations;
  PersonalizationResult result;
  try {
    result.profile = extract_profile(user_id, h);
    PersonalizedExplanation pe = init_personalized(p, s, result.profile, e);
    while (true) {
      JudgeRating rating = judge(result.profile, p, s, pe);
      pe.rating = rating;
      result.ratings.push_back(rating);
      session_.note(stage::kRating, json{{"iteration", pe.iteration}, {"rating", rating}});
      if (rating.satisfied || pe.iteration + 1 >= max_iterations) break;
      pe = revise_personalized(p, s, e, result.profile, pe, rating);
    }
    result.final = std::move(pe);
  } catch (const Error& error) {
    session_.note(stage::kRunFailed, json{{"loop", "personalization"}, {"error", error.what()}});
    throw;
  }
  session_.note(stage::kPersonalizationSummary,
                json{{"drafts", result.ratings.size()},
                     {"final_iteration", result.final.iteration},
                     {"satisfied", result.ratings.back().satisfied}});
  return result;
}

}  // namespace critique_forge
