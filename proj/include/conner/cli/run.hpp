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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conner/backend/cache.hpp"
#include "conner/backend/http_backend.hpp"
#include "conner/backend/scorer.hpp"
#include "conner/cli/config.hpp"
#include "conner/stats/report.hpp"

namespace conner::cli {

// Exit codes of the conner tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBackendDown = 3;
inline constexpr int kExitPartial = 4;
inline constexpr int kExitSchema = 5;

// Builds the transport for one backend config; tests swap in local backends.
using BackendFactory =
    std::function<backend::BackendPtr(const backend::BackendConfig&)>;

backend::BackendPtr make_http_backend(const backend::BackendConfig& cfg);

// Roles that share a (backend_id, base_url) share one transport and one cache.
struct BackendSet {
  backend::Scorer scorer;
  std::vector<backend::BackendPtr> transports;
  std::vector<std::shared_ptr<backend::CachedBackend>> cached;

  std::size_t cache_hits() const;
  std::size_t cache_misses() const;
  // Requests that reached a transport; only counted for HTTP transports.
  std::size_t backend_calls() const;
};

// Throws BackendUnavailable when a transport fails its health check.
BackendSet connect_backends(const RunConfig& cfg,
                            const BackendFactory& factory = make_http_backend);

struct EvaluateResult {
  std::vector<nlohmann::json> items;  // sorted by id
  stats::CorpusReport report;
  nlohmann::json manifest;
  std::size_t failed = 0;
};

// Scores every item and writes items.jsonl, report.json, report.md and
// manifest.json into cfg.output_dir.
EvaluateResult run_evaluate(const RunConfig& cfg,
                            const BackendFactory& factory = make_http_backend);

// Metric name -> human rating key used by correlate.
std::string rating_key(Metric metric);

struct CorrelateOptions {
  std::filesystem::path scores;       // items.jsonl from evaluate
  std::filesystem::path annotations;  // records with id + human_ratings
  std::vector<Metric> metrics;
  std::size_t permutations = stats::kDefaultPermutations;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output_dir;  // correlation.{json,md}
};

std::vector<stats::CorrelationRow> run_correlate(const CorrelateOptions& opts);

struct SelectPromptResult {
  nlohmann::json manifest;
  std::string prefix;
  std::vector<nlohmann::json> prompts;
};

// Writes demonstrations.json, prompt_prefix.txt and, when the config names a
// prompt_test_dataset, prompts.jsonl.
SelectPromptResult run_select_prompt(const RunConfig& cfg, std::size_t m,
                                     std::size_t n,
                                     const BackendFactory& factory = make_http_backend);

struct Candidate {
  std::string query_id;
  std::string candidate_id;
  std::string text;
};

// JSON Lines {"query_id", "candidate_id"?, "text"}; a missing candidate id
// becomes "<query_id>#<position>". Throws SchemaError.
std::vector<Candidate> parse_candidates(const std::filesystem::path& path);

struct SelectKnowledgeResult {
  std::vector<nlohmann::json> selections;  // in dataset order
  std::vector<std::string> failed;         // query ids
};

// Writes knowledge_selection.jsonl and knowledge_selection_failed.json.
SelectKnowledgeResult run_select_knowledge(
    const RunConfig& cfg, const std::filesystem::path& candidates,
    const BackendFactory& factory = make_http_backend);

}  // namespace conner::cli
