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

#include <string>
#include <string_view>
#include <vector>

namespace critique_forge {

// One labeled block of a composed prompt or output.
struct Segment {
  std::string label;
  std::string body;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Header line prefix for each segment.
inline constexpr std::string_view kHeaderPrefix = "## ";
// Bodies containing this substring cannot be recovered by parse_composed().
inline constexpr std::string_view kHeaderSentinel = "\n## ";
// Separator between rendered segments.
inline constexpr std::string_view kSegmentJoin = "\n\n";

// Renders each segment as "## LABEL\nBODY" and joins them with a blank line.
// Labels must be non-empty, single-line and unique; throws CompositionError
// otherwise. The empty list composes to the empty string.
std::string compose(const std::vector<Segment>& segments);

// Inverse of compose() for bodies free of kHeaderSentinel.
// Throws CompositionError on text that does not start with a header.
std::vector<Segment> parse_composed(std::string_view text);

}  // namespace critique_forge
