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

// Command-line front end: explain, pipeline, eval and ingest commands.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "critique_forge/config.hpp"
#include "critique_forge/corpus.hpp"
#include "critique_forge/error.hpp"
#include "critique_forge/gateway.hpp"
#include "critique_forge/harness.hpp"
#include "critique_forge/io.hpp"
#include "critique_forge/metrics.hpp"
#include "critique_forge/parallel.hpp"
#include "critique_forge/runners.hpp"
#include "critique_forge/text.hpp"

namespace cf = critique_forge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Flags shared by every command that talks to a model.
struct ModelFlags {
  std::string config_path;
  std::string record;
  std::string replay;
  std::string scripted;
  std::string model;
  std::string judge_model;
  std::string base_url;
  std::string language;
  std::string runs_dir;
  int max_iterations = 0;
  int samples = 0;
  int threshold = 0;
  int timeout_ms = 0;
  int parallel = 0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--config", f.config_path, "TOML config file")->check(CLI::ExistingFile);
  auto* record = cmd->add_option("--record", f.record, "record completions to this cassette");
  auto* replay = cmd->add_option("--replay", f.replay, "replay completions from this cassette")
                     ->check(CLI::ExistingFile);
  record->excludes(replay);
  cmd->add_option("--scripted", f.scripted,
                  "offline backend: JSON array of completions served in order")
      ->check(CLI::ExistingFile)
      ->excludes(replay);
  cmd->add_option("--model", f.model, "generator model name");
  cmd->add_option("--judge-model", f.judge_model, "judge model name (default: --model)");
  cmd->add_option("--base-url", f.base_url, "chat-completions base URL");
  cmd->add_option("--language", f.language, "execution language tag");
  cmd->add_option("--runs-dir", f.runs_dir, "directory for run records and outputs");
  cmd->add_option("--max-iterations", f.max_iterations, "refinement budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--samples", f.samples, "samples per problem")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", f.threshold, "judge satisfaction threshold (1-10)")
      ->check(CLI::Range(1, 10));
  cmd->add_option("--timeout-ms", f.timeout_ms, "per-test time limit")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--parallel", f.parallel, "concurrent units")->check(CLI::PositiveNumber);
}

cf::AppConfig resolve_config(const ModelFlags& f) {
  cf::AppConfig config = f.config_path.empty() ? cf::AppConfig{} : cf::load_config(f.config_path);
  if (!f.model.empty()) config.model = f.model;
  if (!f.judge_model.empty()) config.judge_model = f.judge_model;
  if (!f.base_url.empty()) config.base_url = f.base_url;
  if (!f.language.empty()) config.session.executor.language = f.language;
  if (!f.runs_dir.empty()) config.runs_dir = f.runs_dir;
  if (f.max_iterations) config.session.loop.max_iterations = f.max_iterations;
  if (f.samples) config.session.loop.samples_per_problem = f.samples;
  if (f.threshold) config.session.loop.satisfaction_threshold = f.threshold;
  if (f.timeout_ms) config.session.loop.per_test_timeout_ms = f.timeout_ms;
  if (f.parallel) config.parallel = f.parallel;
  config.session.loop.validate();
  return config;
}

struct BackendSetup {
  std::shared_ptr<cf::Backend> backend;
  json description;
};

BackendSetup make_backend(const ModelFlags& f, const cf::AppConfig& config) {
  if (!f.replay.empty()) {
    auto replay = std::make_shared<cf::ReplayBackend>(f.replay);
    json desc{{"mode", "replay"}, {"cassette_digest", replay->cassette_digest()}};
    return {std::move(replay), std::move(desc)};
  }
  std::shared_ptr<cf::Backend> inner;
  json desc;
  if (!f.scripted.empty()) {
    auto script = json::parse(cf::io::read_file(f.scripted));
    inner = std::make_shared<cf::ScriptedBackend>(script.get<std::vector<std::string>>());
    desc = {{"mode", "scripted"}};
  } else {
    const char* key = std::getenv(cf::kApiKeyEnv);
    cf::HttpBackendOptions options;
    options.base_url = config.base_url;
    options.model = config.model;
    options.api_key = key ? key : "";
    options.max_in_flight = config.max_in_flight;
    options.retry = config.retry;
    inner = std::make_shared<cf::HttpBackend>(std::move(options));
    desc = {{"mode", "live"}, {"model", config.model}};
  }
  if (!f.record.empty()) {
    desc["recording"] = f.record;
    return {std::make_shared<cf::RecordingBackend>(std::move(inner), f.record), std::move(desc)};
  }
  return {std::move(inner), std::move(desc)};
}

cf::IngestOptions ingest_options(const cf::AppConfig& config) {
  return {.language_tag = config.session.executor.language, .image_markers = config.image_markers};
}

void emit(const json& j) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cout << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n' << std::flush;
}

void log_filter_report(const cf::FilterReport& report) {
  spdlog::info("ingested {} problems: kept {}, dropped {}", report.input, report.kept,
               report.dropped_total());
  for (const auto& [reason, count] : report.dropped) {
    spdlog::info("  dropped ({}): {}", reason, count);
  }
}

// explain / pipeline

struct RunFlags {
  std::string problems;
  std::string split = "validation";
  std::string problem_id;
  std::string histories;
  std::string user;
  std::string method = "self-iteration";
  std::string out;
  int sample = 0;
};

int run_single(const ModelFlags& mf, const RunFlags& rf, bool personalize) {
  const cf::AppConfig config = resolve_config(mf);
  const auto loaded =
      cf::load_problems(rf.problems, cf::split_from_string(rf.split), ingest_options(config));
  log_filter_report(loaded.report);
  const cf::Problem& problem = loaded.corpus.find(rf.problem_id);
  const cf::Method method = cf::method_from_string(rf.method);

  std::optional<cf::UserHistory> history;
  std::optional<std::string> user_id;
  if (personalize) {
    auto histories = cf::load_histories(rf.histories);
    for (const auto& w : histories.warnings) spdlog::warn("{}", w);
    history = histories.find(rf.user);
    user_id = rf.user;
  }

  auto setup = make_backend(mf, config);
  cf::Gateway gateway(setup.backend, config.model, config.judge_model);
  const cf::Sandbox sandbox(config.interpreters);
  const std::string run_id = cf::make_run_id(fmt::format(
      "{}|{}|{}|{}", problem.id, user_id.value_or(""), rf.method, rf.sample));
  cf::RunRecord record(run_id, problem.id, user_id);
  record.append(cf::stage::kBackend, setup.description);
  cf::Session session(gateway, sandbox, config.session, &record);

  const fs::path record_path = config.runs_dir / (run_id + ".jsonl");
  const fs::path out_path = rf.out.empty() ? config.runs_dir / (run_id + ".final.json") : fs::path(rf.out);
  try {
    auto result = cf::run_pipeline(session, problem, history, method);
    record.write(record_path);
    cf::io::write_file_atomic(
        out_path,
        cf::final_output_document(result, problem, user_id, method, rf.sample).dump(2) + "\n");
  } catch (const cf::Error&) {
    record.write(record_path);
    spdlog::error("run {} failed; partial record at {}", run_id, record_path.string());
    throw;
  }
  emit(json{{"run_id", run_id}, {"record", record_path.string()}, {"final", out_path.string()}});
  return kExitOk;
}

// eval pass-at-k

struct PassAtKFlags {
  std::string problems;
  std::string split = "validation";
  std::string method = "self-iteration";
  std::vector<std::string> problem_ids;
  int k = 1;
};

int eval_pass_at_k(const ModelFlags& mf, const PassAtKFlags& pf) {
  cf::AppConfig config = resolve_config(mf);
  if (pf.k > config.session.loop.samples_per_problem) {
    spdlog::warn("k={} exceeds samples={}; raising samples to {}", pf.k,
                 config.session.loop.samples_per_problem, pf.k);
    config.session.loop.samples_per_problem = pf.k;
  }
  const auto loaded =
      cf::load_problems(pf.problems, cf::split_from_string(pf.split), ingest_options(config));
  log_filter_report(loaded.report);
  std::vector<const cf::Problem*> problems;
  if (pf.problem_ids.empty()) {
    for (const auto& p : loaded.corpus.problems) problems.push_back(&p);
  } else {
    for (const auto& id : pf.problem_ids) problems.push_back(&loaded.corpus.find(id));
  }
  const cf::Method method = cf::method_from_string(pf.method);

  auto setup = make_backend(mf, config);
  cf::Gateway gateway(setup.backend, config.model, config.judge_model);
  const cf::Sandbox sandbox(config.interpreters);
  cf::Caches caches;

  std::vector<std::optional<cf::SolveRate>> rates(problems.size());
  std::mutex warn_mu;
  std::size_t failures = 0;
  cf::parallel_for(problems.size(), config.parallel, [&](std::size_t i) {
    const cf::Problem& p = *problems[i];
    const std::string run_id = cf::make_run_id(fmt::format("pass@k|{}|{}", p.id, pf.method));
    cf::RunRecord record(run_id, p.id, std::nullopt);
    record.append(cf::stage::kBackend, setup.description);
    cf::Session session(gateway, sandbox, config.session, &record);
    try {
      auto result = cf::run_pipeline(session, p, std::nullopt, method, &caches);
      rates[i] = cf::solve_rate_for_problem(session, result.output.faithful, p, {1, 5, pf.k});
    } catch (const cf::Error& error) {
      std::lock_guard lock(warn_mu);
      ++failures;
      spdlog::warn("problem {} excluded: {}", p.id, error.what());
    }
    record.write(config.runs_dir / (run_id + ".jsonl"));
  });

  std::map<int, std::vector<cf::UnitValue>> by_k;
  for (const auto& rate : rates) {
    if (!rate) continue;
    emit(json{{"problem_id", rate->problem_id},
              {"n", rate->n},
              {"c", rate->c},
              {"pass_at", rate->pass_at}});
    for (const auto& [k, value] : rate->pass_at) by_k[k].push_back({rate->problem_id, value});
  }
  if (failures) spdlog::warn("{} problem(s) excluded from aggregation", failures);
  if (by_k.empty()) throw cf::Error("no problem produced a pass@k value");
  std::vector<cf::MetricReport> reports;
  for (auto& [k, units] : by_k) {
    reports.push_back(cf::aggregate(cf::Metric::kPassAtK, std::move(units), problems.size(),
                                    fmt::format("{} pass@{}", pf.method, k)));
    for (const auto& w : reports.back().warnings) spdlog::warn("{}", w);
    emit(json(reports.back()));
  }
  std::cerr << cf::format_table(reports);
  return failures ? kExitRuntime : kExitOk;
}

// Stored run documents.

std::vector<json> load_run_documents(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw cf::StorageError("not a directory: " + dir.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".final.json")) paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<json> docs;
  for (const auto& path : paths) {
    try {
      docs.push_back(json::parse(cf::io::read_file(path)));
    } catch (const json::exception& ex) {
      throw cf::StorageError(path.string() + ": " + ex.what());
    }
  }
  return docs;
}

std::string unit_key(const json& doc) {
  return fmt::format("{}/{}/{}", doc.value("user_id", json()).is_null() ? "" : doc.at("user_id").get<std::string>(),
                     doc.at("problem_id").get<std::string>(), doc.value("sample", 0));
}

std::vector<std::string> user_queries(const cf::UserHistory& history) {
  std::vector<std::string> queries;
  for (const auto& inquiry : history.inquiries) {
    queries.push_back(inquiry.title + "\n" + inquiry.body);
  }
  return queries;
}

int eval_text_metrics(const std::string& runs, const std::string& histories_path) {
  const auto histories = cf::load_histories(histories_path);
  std::vector<cf::UnitValue> rouge_units, overlap_units;
  std::size_t seen = 0;
  for (const auto& doc : load_run_documents(runs)) {
    const auto& final = doc.at("final");
    if (final.at("personalized").is_null() || doc.at("user_id").is_null()) continue;
    ++seen;
    const std::string body = final.at("personalized").at("body").get<std::string>();
    const auto queries = user_queries(histories.find(doc.at("user_id").get<std::string>()));
    std::string pooled;
    for (const auto& q : queries) pooled += q + "\n";
    const auto rouge = cf::rouge_l(cf::text::tokenize(body), cf::text::tokenize(pooled));
    const std::string id = unit_key(doc);
    rouge_units.push_back({id, rouge.f});
    try {
      overlap_units.push_back({id, cf::word_overlap_ratio(body, queries)});
    } catch (const cf::DomainError& error) {
      spdlog::warn("unit {} excluded from word overlap: {}", id, error.what());
    }
  }
  if (seen == 0) throw cf::Error("no personalized run documents in " + runs);
  std::vector<cf::MetricReport> reports;
  reports.push_back(cf::aggregate(cf::Metric::kRougeL, std::move(rouge_units), seen, "rouge_l"));
  if (!overlap_units.empty()) {
    reports.push_back(
        cf::aggregate(cf::Metric::kWordOverlap, std::move(overlap_units), seen, "word_overlap"));
  }
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) spdlog::warn("{}", w);
    emit(json(r));
  }
  std::cerr << cf::format_table(reports);
  return kExitOk;
}

int eval_win_rate(const ModelFlags& mf, const std::string& runs_a, const std::string& runs_b,
                  const std::string& histories_path) {
  const cf::AppConfig config = resolve_config(mf);
  const auto histories = cf::load_histories(histories_path);
  std::map<std::string, json> b_docs;
  for (auto& doc : load_run_documents(runs_b)) b_docs[unit_key(doc)] = std::move(doc);

  auto setup = make_backend(mf, config);
  cf::Gateway gateway(setup.backend, config.model, config.judge_model);
  const cf::Sandbox sandbox(config.interpreters);
  const std::string run_id = cf::make_run_id("win-rate|" + runs_a + "|" + runs_b);
  cf::RunRecord record(run_id, "win-rate", std::nullopt);
  record.append(cf::stage::kBackend, setup.description);
  cf::Session session(gateway, sandbox, config.session, &record);
  cf::PersonalizationLoop profiler(session);

  std::vector<cf::ComparisonUnit> units;
  std::size_t expected = 0;
  for (const auto& a : load_run_documents(runs_a)) {
    if (a.at("final").at("personalized").is_null() || a.at("user_id").is_null()) continue;
    ++expected;
    const std::string key = unit_key(a);
    auto it = b_docs.find(key);
    if (it == b_docs.end() || it->second.at("final").at("personalized").is_null()) {
      spdlog::warn("unit {} has no counterpart in {}", key, runs_b);
      continue;
    }
    const std::string user = a.at("user_id").get<std::string>();
    cf::UserProfile profile = a.at("profile").is_null()
                                  ? profiler.extract_profile(user, histories.find(user).inquiries)
                                  : a.at("profile").get<cf::UserProfile>();
    units.push_back({.unit_id = key,
                     .profile = std::move(profile),
                     .problem = a.at("problem").get<std::string>(),
                     .solution = a.at("solution").get<std::string>(),
                     .candidate_a = a.at("final").at("personalized").at("body").get<std::string>(),
                     .candidate_b =
                         it->second.at("final").at("personalized").at("body").get<std::string>()});
  }
  if (units.empty()) throw cf::Error("no aligned units between " + runs_a + " and " + runs_b);
  auto result = cf::win_rate(session, units, expected);
  session.note(cf::stage::kFinalOutput, json(result.report));
  record.write(config.runs_dir / (run_id + ".jsonl"));
  for (const auto& w : result.report.warnings) spdlog::warn("{}", w);
  emit(json(result.report));
  std::cerr << cf::format_table({result.report});
  return kExitOk;
}

int ingest_validate(const std::string& config_path, const std::string& problems,
                    const std::string& split, const std::string& histories_path,
                    const std::string& language) {
  cf::AppConfig config = config_path.empty() ? cf::AppConfig{} : cf::load_config(config_path);
  if (!language.empty()) config.session.executor.language = language;
  json out;
  if (!problems.empty()) {
    const auto loaded =
        cf::load_problems(problems, cf::split_from_string(split), ingest_options(config));
    log_filter_report(loaded.report);
    out["problems"] = json{{"input", loaded.report.input},
                           {"kept", loaded.report.kept},
                           {"dropped", loaded.report.dropped},
                           {"dropped_ids", loaded.report.dropped_ids}};
  }
  if (!histories_path.empty()) {
    const auto loaded = cf::load_histories(histories_path);
    json users = json::object();
    for (const auto& h : loaded.histories) users[h.user_id] = h.inquiries.size();
    for (const auto& w : loaded.warnings) spdlog::warn("{}", w);
    out["histories"] = json{{"users", users}, {"warnings", loaded.warnings}};
  }
  emit(out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("critique_forge");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Faithful, personalized explanations of competitive-programming solutions"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  ModelFlags mf;
  RunFlags rf;

  auto* explain = app.add_subcommand("explain", "run the faithfulness loop for one problem");
  explain->add_option("--problems", rf.problems, "problem corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
  explain->add_option("--split", rf.split, "validation or test");
  explain->add_option("--problem-id", rf.problem_id, "problem to explain")->required();
  explain->add_option("--method", rf.method, "baseline, self-selection or self-iteration");
  explain->add_option("--sample", rf.sample, "sample index recorded with the output");
  explain->add_option("--out", rf.out, "final output file");
  add_model_flags(explain, mf);

  auto* pipeline = app.add_subcommand("pipeline", "run both loops for one problem and user");
  pipeline->add_option("--problems", rf.problems, "problem corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--split", rf.split, "validation or test");
  pipeline->add_option("--problem-id", rf.problem_id, "problem to explain")->required();
  pipeline->add_option("--histories", rf.histories, "inquiry histories (JSON Lines)")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--user", rf.user, "user to personalize for")->required();
  pipeline->add_option("--method", rf.method, "baseline, self-selection or self-iteration");
  pipeline->add_option("--sample", rf.sample, "sample index recorded with the output");
  pipeline->add_option("--out", rf.out, "final output file");
  add_model_flags(pipeline, mf);

  auto* eval = app.add_subcommand("eval", "evaluation metrics");
  eval->require_subcommand(1);

  PassAtKFlags pf;
  auto* pass = eval->add_subcommand("pass-at-k", "solve rate of programs written from explanations");
  pass->add_option("--problems", pf.problems, "problem corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
  pass->add_option("--split", pf.split, "validation or test");
  pass->add_option("--method", pf.method, "baseline, self-selection or self-iteration");
  pass->add_option("--problem-id", pf.problem_ids, "restrict to these problems");
  pass->add_option("--k", pf.k, "k for pass@k")->check(CLI::PositiveNumber);
  add_model_flags(pass, mf);

  std::string runs_dir, runs_a, runs_b, histories;
  auto* text_metrics = eval->add_subcommand("text-metrics", "Rouge-L and word overlap against user queries");
  text_metrics->add_option("--runs", runs_dir, "directory of stored run outputs")->required();
  text_metrics->add_option("--histories", histories, "inquiry histories (JSON Lines)")->required()->check(CLI::ExistingFile);

  auto* win = eval->add_subcommand("win-rate", "pairwise judge comparison of two run sets");
  win->add_option("--runs-a", runs_a, "run outputs of method A")->required();
  win->add_option("--runs-b", runs_b, "run outputs of method B")->required();
  win->add_option("--histories", histories, "inquiry histories (JSON Lines)")->required()->check(CLI::ExistingFile);
  add_model_flags(win, mf);

  auto* ingest = app.add_subcommand("ingest", "corpus utilities");
  ingest->require_subcommand(1);
  std::string ingest_problems, ingest_split = "validation", ingest_config, ingest_language;
  auto* validate = ingest->add_subcommand("validate", "apply ingestion filters and report");
  validate->add_option("--problems", ingest_problems, "problem corpus (JSON Lines)")->check(CLI::ExistingFile);
  validate->add_option("--split", ingest_split, "validation or test");
  validate->add_option("--histories", histories, "inquiry histories (JSON Lines)")->check(CLI::ExistingFile);
  validate->add_option("--config", ingest_config, "TOML config file")->check(CLI::ExistingFile);
  validate->add_option("--language", ingest_language, "target solution language tag");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (explain->parsed()) return run_single(mf, rf, false);
    if (pipeline->parsed()) return run_single(mf, rf, true);
    if (pass->parsed()) return eval_pass_at_k(mf, pf);
    if (text_metrics->parsed()) return eval_text_metrics(runs_dir, histories);
    if (win->parsed()) return eval_win_rate(mf, runs_a, runs_b, histories);
    if (validate->parsed()) {
      if (ingest_problems.empty() && histories.empty()) {
        spdlog::error("ingest validate needs --problems and/or --histories");
        return kExitUsage;
      }
      return ingest_validate(ingest_config, ingest_problems, ingest_split, histories,
                             ingest_language);
    }
  } catch (const cf::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
