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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace critique_forge {

// Unbiased pass@k estimate 1 - C(n-c, k) / C(n, k), evaluated as
// 1 - prod_{i=n-c+1..n} (1 - k/i). Exactly 1 when n - c < k.
// Throws DomainError unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

struct RougeScore {
  double precision = 0;
  double recall = 0;
  double f = 0;
};

inline constexpr double kRougeBeta = 1.2;

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Rouge-L from the LCS of the token sequences:
// f = (1 + beta^2) P R / (R + beta^2 P), 0 when P + R = 0.
RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, double beta = kRougeBeta);

// |uniq(generated) & uniq(queries)| / |uniq(generated)| over tokenize().
// Throws DomainError when `generated` has no tokens.
double word_overlap_ratio(std::string_view generated, const std::vector<std::string>& queries);

enum class Metric { kPassAtK, kWinRate, kRougeL, kWordOverlap };

std::string to_string(Metric metric);

struct UnitValue {
  std::string unit_id;
  double value = 0;
};

struct MetricReport {
  Metric metric = Metric::kPassAtK;
  std::string label;
  std::vector<UnitValue> per_unit;
  double mean = 0;
  // Sample standard deviation (n - 1); 0 for a single unit.
  double std = 0;
  std::size_t n_units = 0;
  std::vector<std::string> warnings;
};

// Mean and sample std over the units. When `expected_units` is given and
// more than the units present, a gap warning is attached.
// Throws DomainError on zero units.
MetricReport aggregate(Metric metric, std::vector<UnitValue> units,
                       std::optional<std::size_t> expected_units = std::nullopt,
                       std::string label = {});

void to_json(nlohmann::json& j, const MetricReport& report);

// "label  metric  mean% ± std  (n=..)" rows; pass@k and word overlap are
// percentages, the others plain decimals.
std::string format_table(const std::vector<MetricReport>& reports);

}  // namespace critique_forge
