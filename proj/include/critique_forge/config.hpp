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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "critique_forge/gateway.hpp"
#include "critique_forge/sandbox.hpp"
#include "critique_forge/session.hpp"
#include "critique_forge/types.hpp"

namespace critique_forge {

// Values of the TOML subset accepted in config files.
using TomlValue = std::variant<std::string, std::int64_t, double, bool, std::vector<std::string>>;
// Flattened "section.key" -> value.
using TomlTable = std::map<std::string, TomlValue>;

// Parses [section] headers, `key = value` pairs, comments, basic strings,
// integers, floats, booleans and arrays of strings. Throws ConfigError with
// the line number on anything else.
TomlTable parse_toml(std::string_view text);

struct AppConfig {
  std::string model = "gpt-3.5-turbo";
  // Empty: the judge uses `model`.
  std::string judge_model;
  std::string base_url = "https://api.openai.com/v1";
  SessionOptions session;
  InterpreterTable interpreters = default_interpreters();
  std::vector<std::string> image_markers{"<image>"};
  RetryPolicy retry;
  int max_in_flight = 4;
  int parallel = 4;
  std::filesystem::path runs_dir = "runs";
};

// Defaults overlaid with the file's values.
AppConfig load_config(const std::filesystem::path& path);
AppConfig apply_toml(AppConfig config, const TomlTable& table);

}  // namespace critique_forge
