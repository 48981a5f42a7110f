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
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "critique_forge/types.hpp"

namespace critique_forge {

struct ExecutionLimits {
  int per_test_timeout_ms = 10000;
  std::size_t max_output_bytes = std::size_t{1} << 20;
};

// language tag -> argv template; "{source}" is replaced by the source path.
using InterpreterTable = std::map<std::string, std::vector<std::string>>;

// python3 and sh.
InterpreterTable default_interpreters();

// CRLF -> LF, trailing whitespace stripped per line, trailing empty lines
// dropped. Invalid UTF-8 is replaced first.
std::string normalize_output(std::string_view raw);

// Runs untrusted programs in child processes, one fresh process and temp
// directory per test. There is no confinement beyond that: network and
// filesystem access are a deployment concern.
//
// Thread-safe. At most `max_concurrency` child processes run at once.
class Sandbox {
 public:
  explicit Sandbox(InterpreterTable interpreters = default_interpreters(),
                   int max_concurrency = 0);

  // Executes every test in order, never short-circuiting.
  // Throws UnknownLanguage, SandboxSpawnFailure, or ContractError on an empty
  // test list.
  ExecutionReport run_tests(std::string_view source, const std::string& language_tag,
                            const std::vector<TestCase>& tests,
                            const ExecutionLimits& limits) const;

  const InterpreterTable& interpreters() const { return interpreters_; }

 private:
  TestResult run_one(const std::vector<std::string>& argv_template, std::string_view source,
                     const TestCase& test, const ExecutionLimits& limits) const;

  InterpreterTable interpreters_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

}  // namespace critique_forge
