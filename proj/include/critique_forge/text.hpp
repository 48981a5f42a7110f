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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace critique_forge::text {

// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view raw);

// Number of code points in valid UTF-8 text.
std::size_t utf8_length(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);

// Finds "HEADING:" lines (case-insensitive; leading '#', '*' and blanks
// ignored) and returns the trimmed text that follows each heading up to the
// next recognised heading. Headings absent from the text are absent from the
// result.
std::map<std::string, std::string> extract_sections(
    std::string_view text, const std::vector<std::string>& headings);

// Body of the first ``` fenced block, without the info string line.
std::optional<std::string> first_fenced_block(std::string_view text);

// Lowercases and splits on every maximal run of non-alphanumeric code points.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace critique_forge::text
