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

#include "critique_forge/compose.hpp"

#include <unordered_set>

#include "critique_forge/error.hpp"

namespace critique_forge {

std::string compose(const std::vector<Segment>& segments) {
  std::unordered_set<std::string_view> seen;
  std::string out;
  for (const auto& segment : segments) {
    if (segment.label.empty()) {
      throw CompositionError("segment label must be non-empty");
    }
    if (segment.label.find('\n') != std::string::npos) {
      throw CompositionError("segment label must be a single line: " +
                             segment.label);
    }
    if (!seen.insert(segment.label).second) {
      throw CompositionError("duplicate segment label: " + segment.label);
    }
    if (!out.empty()) out += kSegmentJoin;
    out += kHeaderPrefix;
    out += segment.label;
    out += '\n';
    out += segment.body;
  }
  return out;
}

std::vector<Segment> parse_composed(std::string_view text) {
  std::vector<Segment> segments;
  if (text.empty()) return segments;
  if (!text.starts_with(kHeaderPrefix)) {
    throw CompositionError("composed text must start with a segment header");
  }
  // Every boundary is a blank line directly followed by a header.
  const std::string boundary = std::string(kSegmentJoin) + std::string(kHeaderPrefix);
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t next = text.find(boundary, start);
    std::string_view chunk = text.substr(
        start, next == std::string_view::npos ? std::string_view::npos
                                              : next - start);
    chunk.remove_prefix(kHeaderPrefix.size());
    std::size_t eol = chunk.find('\n');
    if (eol == std::string_view::npos) {
      throw CompositionError("segment header without a line break");
    }
    segments.push_back(
        {std::string(chunk.substr(0, eol)), std::string(chunk.substr(eol + 1))});
    if (next == std::string_view::npos) break;
    start = next + kSegmentJoin.size();
  }
  return segments;
}

}  // namespace critique_forge
