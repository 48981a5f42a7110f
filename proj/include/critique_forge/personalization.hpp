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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critique_forge/session.hpp"
#include "critique_forge/types.hpp"

namespace critique_forge {

UserProfile parse_profile(std::string_view completion);

// Reads the last "RATING: n" line (n in 1..10). nullopt when absent or out of
// range. Suggestions are the completion minus that line.
std::optional<JudgeRating> parse_rating(std::string_view completion, int threshold);

struct PersonalizationResult {
  PersonalizedExplanation final;
  std::vector<JudgeRating> ratings;
  UserProfile profile;
};

// Profile the user once, then draft -> judge -> (revise -> judge) until the
// role-playing judge is satisfied or max_iterations drafts exist. The
// faithful explanation is read-only input.
class PersonalizationLoop {
 public:
  explicit PersonalizationLoop(Session& session, KeyedCache<UserProfile>* profiles = nullptr);

  // Throws ContractError on an empty history. `user_id` keys the cache.
  UserProfile extract_profile(const std::string& user_id, const std::vector<UserInquiry>& h);
  PersonalizedExplanation init_personalized(const Problem& p, const Solution& s,
                                            const UserProfile& up, const Explanation& e);
  // One strict re-ask on an unparseable verdict, then score 1 / unsatisfied.
  JudgeRating judge(const UserProfile& up, const Problem& p, const Solution& s,
                    const PersonalizedExplanation& pe);
  // Throws ContractError when the rating is already satisfied.
  PersonalizedExplanation revise_personalized(const Problem& p, const Solution& s,
                                              const Explanation& e, const UserProfile& up,
                                              const PersonalizedExplanation& pe,
                                              const JudgeRating& rating);

  PersonalizationResult run(const Problem& p, const Solution& s, const Explanation& e,
                            const std::string& user_id, const std::vector<UserInquiry>& h);

 private:
  Session& session_;
  KeyedCache<UserProfile>* profiles_;
};

}  // namespace critique_forge
