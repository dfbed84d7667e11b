// Copyright 2026 The Conner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "conner/backend/mock.hpp"
#include "conner/backend/server.hpp"
#include "conner/cli/config.hpp"
#include "conner/cli/run.hpp"
#include "conner/core/error.hpp"
#include "conner/selection/selection.hpp"
#include "conner/stats/report.hpp"

namespace {

using namespace conner;
using namespace conner::cli;

int evaluate(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const auto result = run_evaluate(cfg);
  std::cout << stats::render_markdown(result.report);
  const auto& cache = result.manifest["cache"];
  spdlog::info("{} items, {} failed, cache hits {} misses {}, backend calls {}",
               result.items.size(), result.failed, cache["hits"].get<std::size_t>(),
               cache["misses"].get<std::size_t>(),
               result.manifest["backend_calls"].get<std::size_t>());
  return result.failed == 0 ? kExitOk : kExitPartial;
}

int correlate(CorrelateOptions opts, const std::vector<std::string>& metric_names) {
  for (const auto& name : metric_names) opts.metrics.push_back(parse_metric(name));
  const auto rows = run_correlate(opts);
  std::cout << stats::render_correlation_markdown(rows);
  return kExitOk;
}

int select_prompt(const std::string& config_path, std::size_t m, std::size_t n) {
  const RunConfig cfg = load_config(config_path);
  const auto result = run_select_prompt(cfg, m, n);
  for (const auto& c : result.manifest["chosen"]) {
    std::cout << fmt::format("{}\t{:.4f}\n", c["id"].get<std::string>(),
                             c["q_know"].get<double>());
  }
  return kExitOk;
}

int select_knowledge(const std::string& config_path, const std::string& candidates) {
  const RunConfig cfg = load_config(config_path);
  const auto result = run_select_knowledge(cfg, candidates);
  for (const auto& s : result.selections) {
    std::cout << fmt::format("{}\t{}\n", s["query_id"].get<std::string>(),
                             s["chosen"].get<std::string>());
  }
  for (const auto& id : result.failed) std::cerr << "failed: " << id << "\n";
  return result.failed.empty() ? kExitOk : kExitPartial;
}

int serve_mock(const std::optional<std::string>& corpus, const std::string& host,
               int port, const std::string& backend_id) {
  std::vector<backend::Passage> passages;
  if (corpus) passages = backend::load_corpus(*corpus);
  backend::BackendServer server(
      std::make_shared<backend::MockBackend>(std::move(passages), backend_id));
  const int bound = server.bind(host, port);
  std::cout << "listening on " << host << ":" << bound << std::endl;
  server.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("conner"));

  CLI::App app{"conner: knowledge evaluation for knowledge-grounded generation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  std::string config_path;

  auto* eval = app.add_subcommand("evaluate", "score a dataset");
  eval->add_option("-c,--config", config_path, "run config (JSON)")->required();

  CorrelateOptions corr;
  std::vector<std::string> metric_names;
  std::string corr_out;
  auto* corr_cmd = app.add_subcommand("correlate", "Somers' D against human ratings");
  corr_cmd->add_option("--scores", corr.scores, "items.jsonl from evaluate")->required();
  corr_cmd->add_option("--human", corr.annotations, "JSON Lines with id and human_ratings")
      ->required();
  corr_cmd->add_option("--metrics", metric_names, "metric names")->required();
  corr_cmd->add_option("--permutations", corr.permutations, "permutation count")
      ->check(CLI::Range(static_cast<std::size_t>(stats::kMinPermutations),
                         static_cast<std::size_t>(100000000)));
  corr_cmd->add_option("--seed", corr.seed, "permutation seed");
  corr_cmd->add_option("-o,--output-dir", corr_out, "write correlation.json and .md here");

  std::size_t m = selection::kDefaultSampleSize;
  std::size_t n = selection::kDefaultDemonstrations;
  auto* sp = app.add_subcommand("select-prompt", "choose few-shot demonstrations");
  sp->add_option("-c,--config", config_path, "run config (JSON)")->required();
  sp->add_option("--m", m, "pool sample size");
  sp->add_option("--n", n, "demonstrations kept");

  std::string candidates;
  auto* sk = app.add_subcommand("select-knowledge", "pick the best candidate per query");
  sk->add_option("-c,--config", config_path, "run config (JSON)")->required();
  sk->add_option("--candidates", candidates, "JSON Lines of candidates")->required();

  std::optional<std::string> corpus;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string backend_id = "mock";
  auto* sm = app.add_subcommand("serve-mock", "serve the mock backend over HTTP");
  sm->add_option("--corpus", corpus, "evidence passages (JSON Lines)");
  sm->add_option("--host", host, "bind address");
  sm->add_option("--port", port, "port; 0 picks a free one")->check(CLI::Range(0, 65535));
  sm->add_option("--backend-id", backend_id, "id reported by /v1/health");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*eval) return evaluate(config_path);
    if (*corr_cmd) {
      if (!corr_out.empty()) corr.output_dir = corr_out;
      return correlate(corr, metric_names);
    }
    if (*sp) return select_prompt(config_path, m, n);
    if (*sk) return select_knowledge(config_path, candidates);
    if (*sm) return serve_mock(corpus, host, port, backend_id);
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const BackendUnavailable& e) {
    spdlog::error("backend: {}", e.what());
    return kExitBackendDown;
  } catch (const SchemaError& e) {
    spdlog::error("data: {}", e.what());
    return kExitSchema;
  } catch (const InvalidArgument& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return kExitOk;
}
