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

#include "critique_forge/text.hpp"

#include <algorithm>
#include <cctype>
#include <locale>

namespace critique_forge::text {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point at `pos`; returns the number of bytes consumed, or 0
// if the sequence is invalid.
std::size_t decode_one(std::string_view s, std::size_t pos, char32_t& out) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    out = b0;
    return 1;
  }
  std::size_t len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong encodings, surrogates and out-of-range values.
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return 0;
  }
  out = cp;
  return len;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::vector<char32_t> decode(std::string_view s) {
  std::vector<char32_t> cps;
  cps.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    char32_t cp;
    std::size_t n = decode_one(s, pos, cp);
    if (n == 0) {
      cps.push_back(kReplacement);
      ++pos;
    } else {
      cps.push_back(cp);
      pos += n;
    }
  }
  return cps;
}

const std::ctype<wchar_t>& wide_ctype() {
  static const std::locale loc = [] {
    try {
      return std::locale("C.UTF-8");
    } catch (const std::runtime_error&) {
      return std::locale::classic();
    }
  }();
  return std::use_facet<std::ctype<wchar_t>>(loc);
}

std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string sanitize_utf8(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char32_t cp : decode(raw)) encode(cp, out);
  return out;
}

std::size_t utf8_length(std::string_view text) { return decode(text).size(); }

std::string_view trim(std::string_view s) {
  constexpr std::string_view kBlank = " \t\r\n\f\v";
  auto first = s.find_first_not_of(kBlank);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(kBlank);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto eol = s.find('\n', start);
    if (eol == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, eol - start));
    start = eol + 1;
  }
  return lines;
}

std::map<std::string, std::string> extract_sections(
    std::string_view text, const std::vector<std::string>& headings) {
  std::map<std::string, std::string> sections;
  std::string current;
  std::string buffer;
  auto flush = [&] {
    if (!current.empty()) {
      std::string_view body = trim(buffer);
      auto& slot = sections[current];
      if (!slot.empty() && !body.empty()) slot += "\n";
      slot += body;
    }
    buffer.clear();
  };

  for (std::string_view line : split_lines(text)) {
    std::string_view stripped = trim(line);
    while (!stripped.empty() && (stripped.front() == '#' || stripped.front() == '*')) {
      stripped.remove_prefix(1);
    }
    stripped = trim(stripped);
    const std::string upper = ascii_upper(stripped);

    const std::string* matched = nullptr;
    for (const auto& heading : headings) {
      const std::string key = ascii_upper(heading) + ":";
      if (upper.starts_with(key)) {
        matched = &heading;
        break;
      }
    }
    if (matched) {
      flush();
      current = *matched;
      sections.try_emplace(current);
      std::string_view rest = stripped.substr(matched->size() + 1);
      while (!rest.empty() && rest.front() == '*') rest.remove_prefix(1);
      buffer = std::string(trim(rest));
      if (!buffer.empty()) buffer += '\n';
      continue;
    }
    if (!current.empty()) {
      buffer += line;
      buffer += '\n';
    }
  }
  flush();
  return sections;
}

std::optional<std::string> first_fenced_block(std::string_view text) {
  auto open = text.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  auto body_start = text.find('\n', open);
  if (body_start == std::string_view::npos) return std::nullopt;
  ++body_start;
  auto close = text.find("```", body_start);
  std::string_view body = close == std::string_view::npos
                              ? text.substr(body_start)
                              : text.substr(body_start, close - body_start);
  return std::string(body);
}

std::vector<std::string> tokenize(std::string_view text) {
  const auto& ct = wide_ctype();
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : decode(text)) {
    const auto wc = static_cast<wchar_t>(cp);
    if (ct.is(std::ctype_base::alnum, wc)) {
      encode(static_cast<char32_t>(ct.tolower(wc)), current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace critique_forge::text
