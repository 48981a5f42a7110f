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

#include "critique_forge/config.hpp"

#include <charconv>

#include <fmt/format.h>

#include "critique_forge/error.hpp"
#include "critique_forge/io.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {
namespace {

class TomlParser {
 public:
  TomlParser(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  TomlValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    TomlValue v;
    if (c == '"' || c == '\'') {
      v = string();
    } else if (c == '[') {
      v = array();
    } else if (s_.substr(pos_).starts_with("true")) {
      pos_ += 4;
      v = true;
    } else if (s_.substr(pos_).starts_with("false")) {
      pos_ += 5;
      v = false;
    } else {
      v = number();
    }
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(fmt::format("config line {}: {}", line_no_, what));
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string string() {
    const char quote = s_[pos_++];
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != quote) {
      char c = s_[pos_++];
      if (quote == '"' && c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::vector<std::string> array() {
    ++pos_;
    std::vector<std::string> out;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) {
        fail("arrays may only hold strings");
      }
      out.push_back(string());
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return out;
        }
        continue;
      }
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      fail("unterminated array");
    }
  }

  TomlValue number() {
    std::size_t end = pos_;
    while (end < s_.size() && std::string_view("+-0123456789._eE").find(s_[end]) != std::string_view::npos) {
      ++end;
    }
    std::string token(s_.substr(pos_, end - pos_));
    std::erase(token, '_');
    if (token.empty()) fail("unrecognised value");
    if (token.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      const char* first = token.data() + (token.front() == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) fail("bad integer " + token);
      pos_ = end;
      return v;
    }
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(token, &used);
      if (used != token.size()) fail("bad float " + token);
    } catch (const std::logic_error&) {
      fail("bad float " + token);
    }
    pos_ = end;
    return v;
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

double as_double(const TomlValue& v, const std::string& key) {
  if (auto d = std::get_if<double>(&v)) return *d;
  if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw ConfigError(key + " must be a number");
}

std::int64_t as_int(const TomlValue& v, const std::string& key) {
  if (auto i = std::get_if<std::int64_t>(&v)) return *i;
  throw ConfigError(key + " must be an integer");
}

std::string as_string(const TomlValue& v, const std::string& key) {
  if (auto s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError(key + " must be a string");
}

std::vector<std::string> as_strings(const TomlValue& v, const std::string& key) {
  if (auto a = std::get_if<std::vector<std::string>>(&v)) return *a;
  throw ConfigError(key + " must be an array of strings");
}

}  // namespace

TomlTable parse_toml(std::string_view text) {
  TomlTable table;
  std::string section;
  std::size_t line_no = 0;
  for (auto raw : text::split_lines(text)) {
    ++line_no;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string_view::npos) {
        throw ConfigError(fmt::format("config line {}: unterminated section header", line_no));
      }
      section = std::string(text::trim(line.substr(1, close - 1)));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    }
    std::string key(text::trim(line.substr(0, eq)));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) throw ConfigError(fmt::format("config line {}: empty key", line_no));
    TomlParser parser(line.substr(eq + 1), line_no);
    table[section.empty() ? key : section + "." + key] = parser.value();
  }
  return table;
}

AppConfig apply_toml(AppConfig config, const TomlTable& table) {
  for (const auto& [key, value] : table) {
    if (key == "model") {
      config.model = as_string(value, key);
    } else if (key == "judge_model") {
      config.judge_model = as_string(value, key);
    } else if (key == "base_url") {
      config.base_url = as_string(value, key);
    } else if (key == "max_tokens") {
      const int tokens = static_cast<int>(as_int(value, key));
      config.session.code_params.max_tokens = tokens;
      config.session.text_params.max_tokens = tokens;
    } else if (key == "parallel") {
      config.parallel = static_cast<int>(as_int(value, key));
    } else if (key == "max_in_flight") {
      config.max_in_flight = static_cast<int>(as_int(value, key));
    } else if (key == "runs_dir") {
      config.runs_dir = as_string(value, key);
    } else if (key == "presets.code.temperature") {
      config.session.code_params.temperature = as_double(value, key);
    } else if (key == "presets.code.top_p") {
      config.session.code_params.top_p = as_double(value, key);
    } else if (key == "presets.text.temperature") {
      config.session.text_params.temperature = as_double(value, key);
    } else if (key == "presets.text.top_p") {
      config.session.text_params.top_p = as_double(value, key);
    } else if (key == "loop.max_iterations") {
      config.session.loop.max_iterations = static_cast<int>(as_int(value, key));
    } else if (key == "loop.samples_per_problem") {
      config.session.loop.samples_per_problem = static_cast<int>(as_int(value, key));
    } else if (key == "loop.satisfaction_threshold") {
      config.session.loop.satisfaction_threshold = static_cast<int>(as_int(value, key));
    } else if (key == "executor.per_test_timeout_ms" || key == "loop.per_test_timeout_ms") {
      const int ms = static_cast<int>(as_int(value, key));
      config.session.loop.per_test_timeout_ms = ms;
      config.session.executor.limits.per_test_timeout_ms = ms;
    } else if (key == "executor.max_output_bytes") {
      config.session.executor.limits.max_output_bytes = static_cast<std::size_t>(as_int(value, key));
    } else if (key == "executor.language") {
      config.session.executor.language = as_string(value, key);
    } else if (key.starts_with("executor.languages.")) {
      config.interpreters[key.substr(std::string("executor.languages.").size())] =
          as_strings(value, key);
    } else if (key == "corpus.image_markers") {
      config.image_markers = as_strings(value, key);
    } else if (key == "retry.max_attempts") {
      config.retry.max_attempts = static_cast<int>(as_int(value, key));
    } else if (key == "retry.initial_delay_ms") {
      config.retry.initial_delay = std::chrono::milliseconds(as_int(value, key));
    } else if (key == "retry.factor") {
      config.retry.factor = as_double(value, key);
    } else if (key == "retry.jitter") {
      config.retry.jitter = as_double(value, key);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  config.session.loop.validate();
  for (const auto* p : {&config.session.code_params, &config.session.text_params}) {
    if (p->temperature < 0) throw ConfigError("temperature must be >= 0");
    if (!(p->top_p > 0 && p->top_p <= 1)) throw ConfigError("top_p must be in (0, 1]");
  }
  return config;
}

AppConfig load_config(const std::filesystem::path& path) {
  return apply_toml(AppConfig{}, parse_toml(io::read_file(path)));
}

}  // namespace critique_forge
