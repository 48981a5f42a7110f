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

#include <stdexcept>
#include <string>

namespace critique_forge {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

// Violated precondition of an operation (e.g. analyzing a passing report).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Argument outside a metric's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

// Gateway errors.
class GatewayError : public Error {
 public:
  using Error::Error;
};

class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class RateLimited : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ProviderError : public GatewayError {
 public:
  ProviderError(int status, const std::string& what)
      : GatewayError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class MissingRecording : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ScriptExhausted : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

// Prompt rendering errors.
class PromptError : public Error {
 public:
  using Error::Error;
};

class MissingField : public PromptError {
 public:
  MissingField(std::string kind, std::string field)
      : PromptError("prompt '" + kind + "' is missing field '" + field + "'"),
        kind_(std::move(kind)),
        field_(std::move(field)) {}
  const std::string& kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  std::string kind_;
  std::string field_;
};

class UnexpectedField : public PromptError {
 public:
  UnexpectedField(std::string kind, std::string field)
      : PromptError("prompt '" + kind + "' does not accept field '" + field +
                    "'"),
        kind_(std::move(kind)),
        field_(std::move(field)) {}
  const std::string& kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  std::string kind_;
  std::string field_;
};

// Sandbox infrastructure errors. Candidate failures are verdicts, not errors.
class SandboxError : public Error {
 public:
  using Error::Error;
};

class UnknownLanguage : public SandboxError {
 public:
  explicit UnknownLanguage(const std::string& tag)
      : SandboxError("no interpreter configured for language '" + tag + "'") {}
};

class SandboxSpawnFailure : public SandboxError {
 public:
  using SandboxError::SandboxError;
};

}  // namespace critique_forge
