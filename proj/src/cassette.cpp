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

#include <fmt/format.h>

#include "critique_forge/error.hpp"
#include "critique_forge/gateway.hpp"
#include "critique_forge/io.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {

using nlohmann::json;

namespace {

json request_json(const ChatRequest& request) {
  return json{{"model", request.model},
              {"messages", request.messages},
              {"temperature", request.params.temperature},
              {"top_p", request.params.top_p},
              {"max_tokens", request.params.max_tokens}};
}

}  // namespace

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner,
                                   std::filesystem::path cassette)
    : inner_(std::move(inner)), path_(std::move(cassette)) {
  if (!inner_) throw ConfigError("recording backend requires an inner backend");
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw StorageError("cannot open cassette for writing: " + path_.string());
  out_.flush();
}

Completion RecordingBackend::complete(const ChatRequest& request) {
  Completion completion = inner_->complete(request);
  std::lock_guard lock(mu_);
  json line{{"digest", request.request_digest},
            {"request", request_json(request)},
            {"completion", completion},
            {"seq", seq_++}};
  out_ << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  out_.flush();
  if (!out_) throw StorageError("cannot append to cassette " + path_.string());
  return completion;
}

std::size_t RecordingBackend::recorded() const {
  std::lock_guard lock(mu_);
  return seq_;
}

ReplayBackend::ReplayBackend(const std::filesystem::path& cassette) {
  const std::string content = io::read_file(cassette);
  cassette_digest_ = io::sha256_hex(content);
  std::vector<std::pair<std::uint64_t, std::pair<std::string, Completion>>> rows;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      rows.push_back({j.at("seq").get<std::uint64_t>(),
                      {j.at("digest").get<std::string>(), j.at("completion").get<Completion>()}});
    } catch (const json::exception& ex) {
      throw StorageError(fmt::format("{}:{}: malformed cassette line: {}", cassette.string(),
                                     line_no, ex.what()));
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [seq, entry] : rows) {
    entries_[entry.first].push_back(std::move(entry.second));
  }
}

Completion ReplayBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(request.request_digest);
  if (it == entries_.end() || it->second.empty()) {
    throw MissingRecording("no recorded completion for request digest " +
                           request.request_digest);
  }
  Completion completion = std::move(it->second.front());
  it->second.pop_front();
  return completion;
}

std::size_t ReplayBackend::entries() const {
  std::lock_guard lock(mu_);
  std::size_t total = 0;
  for (const auto& [digest, queue] : entries_) total += queue.size();
  return total;
}

}  // namespace critique_forge
