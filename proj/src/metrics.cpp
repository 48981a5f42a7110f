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

#include "critique_forge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "critique_forge/error.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

double pass_at_k(int n, int c, int k) {
  if (n < 0 || c < 0 || k < 1 || c > n || k > n) {
    throw DomainError(fmt::format("pass@k undefined for n={}, c={}, k={}", n, c, k));
  }
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (int i = n - c + 1; i <= n; ++i) {
    miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  }
  return 1.0 - miss;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, double beta) {
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  RougeScore score;
  score.precision = candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
  score.recall = reference.empty() ? 0.0 : lcs / static_cast<double>(reference.size());
  if (score.precision + score.recall > 0) {
    const double b2 = beta * beta;
    score.f = (1 + b2) * score.precision * score.recall / (score.recall + b2 * score.precision);
  }
  return score;
}

double word_overlap_ratio(std::string_view generated, const std::vector<std::string>& queries) {
  const auto gen_tokens = text::tokenize(generated);
  std::unordered_set<std::string> gen(gen_tokens.begin(), gen_tokens.end());
  if (gen.empty()) throw DomainError("generated text has no tokens");
  std::unordered_set<std::string> pool;
  for (const auto& q : queries) {
    for (auto& token : text::tokenize(q)) pool.insert(std::move(token));
  }
  std::size_t shared = 0;
  for (const auto& token : gen) shared += pool.count(token);
  return static_cast<double>(shared) / static_cast<double>(gen.size());
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kPassAtK: return "pass_at_k";
    case Metric::kWinRate: return "win_rate";
    case Metric::kRougeL: return "rouge_l";
    case Metric::kWordOverlap: return "word_overlap";
  }
  return "pass_at_k";
}

MetricReport aggregate(Metric metric, std::vector<UnitValue> units,
                       std::optional<std::size_t> expected_units, std::string label) {
  if (units.empty()) throw DomainError("cannot aggregate zero units");
  MetricReport report;
  report.metric = metric;
  report.label = std::move(label);
  report.n_units = units.size();
  double sum = 0;
  for (const auto& u : units) sum += u.value;
  report.mean = sum / static_cast<double>(units.size());
  if (units.size() > 1) {
    double ss = 0;
    for (const auto& u : units) ss += (u.value - report.mean) * (u.value - report.mean);
    report.std = std::sqrt(ss / static_cast<double>(units.size() - 1));
  }
  if (expected_units && *expected_units > units.size()) {
    report.warnings.push_back(fmt::format("{} of {} units present; {} excluded", units.size(),
                                          *expected_units, *expected_units - units.size()));
  }
  report.per_unit = std::move(units);
  return report;
}

void to_json(nlohmann::json& j, const MetricReport& report) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : report.per_unit) {
    units.push_back({{"unit_id", u.unit_id}, {"value", u.value}});
  }
  j = nlohmann::json{{"metric", to_string(report.metric)},
                     {"label", report.label},
                     {"per_unit", std::move(units)},
                     {"mean", report.mean},
                     {"std", report.std},
                     {"n_units", report.n_units},
                     {"warnings", report.warnings}};
}

std::string format_table(const std::vector<MetricReport>& reports) {
  std::string out = fmt::format("{:<32} {:<14} {:>22} {:>8}\n", "label", "metric", "mean ± std",
                                "units");
  for (const auto& r : reports) {
    const bool percent = r.metric == Metric::kPassAtK || r.metric == Metric::kWordOverlap;
    const std::string value = percent ? fmt::format("{:.2f}% ± {:.4f}", 100 * r.mean, r.std)
                                      : fmt::format("{:.4f} ± {:.4f}", r.mean, r.std);
    out += fmt::format("{:<32} {:<14} {:>22} {:>8}\n", r.label, to_string(r.metric), value,
                       r.n_units);
  }
  return out;
}

}  // namespace critique_forge
