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

#include <algorithm>
#include <fstream>
#include <map>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "conner/cli/dataset.hpp"
#include "conner/cli/run.hpp"
#include "conner/core/error.hpp"
#include "conner/core/text.hpp"
#include "conner/intrinsic/intrinsic.hpp"
#include "conner/selection/selection.hpp"

namespace conner::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr Metric kQualityMetrics[] = {Metric::kFact, Metric::kRel, Metric::kCohPara,
                                      Metric::kInfo};

void require_quality_backends(const RunConfig& cfg) {
  std::vector<std::string> missing;
  for (Metric metric : kQualityMetrics) {
    for (auto e : required_endpoints(metric, cfg.format)) {
      const auto name = std::string(backend::to_string(e));
      if (!cfg.backends.contains(e) &&
          std::find(missing.begin(), missing.end(), name) == missing.end()) {
        missing.push_back(name);
      }
    }
  }
  if (!missing.empty()) {
    throw ConfigError(fmt::format("knowledge quality scoring needs backends for: {}",
                                  fmt::join(missing, ", ")));
  }
}

selection::QualityFn quality_fn(const RunConfig& cfg, const backend::Scorer& scorer) {
  selection::QualityConfig qc{
      cfg.factuality,
      selection::load_template(cfg.templates.informativeness, cfg.templates.dir), 1};
  return [&scorer, qc](const Query& q, const Knowledge& k) {
    return selection::intrinsic_scores(scorer, q, k, qc);
  };
}

json gamma_json(const selection::Gamma& g) {
  const auto& w = g.weights();
  return {w[0], w[1], w[2], w[3]};
}

void write_lines(const fs::path& path, const std::vector<json>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& l : lines) out << l.dump() << "\n";
}

}  // namespace

SelectPromptResult run_select_prompt(const RunConfig& cfg, std::size_t m, std::size_t n,
                                     const BackendFactory& factory) {
  require_quality_backends(cfg);
  const auto items = parse_dataset(cfg.dataset_path, cfg.format);
  std::vector<EvalItem> tests;
  if (cfg.prompt_test_dataset) tests = parse_dataset(*cfg.prompt_test_dataset, cfg.format);
  const auto tmpl = selection::load_template(cfg.templates.fewshot, cfg.templates.dir);

  BackendSet backends = connect_backends(cfg, factory);
  std::vector<selection::PoolEntry> pool;
  pool.reserve(items.size());
  for (const auto& item : items) pool.push_back({item.query, item.knowledge});

  const auto sel = selection::select_demonstrations(
      pool, m, n, cfg.gamma, cfg.seed, quality_fn(cfg, backends.scorer), cfg.concurrency);

  SelectPromptResult result;
  for (const auto& d : sel.chosen) {
    auto values = intrinsic::query_values(d.query);
    values["knowledge"] = d.knowledge.text();
    result.prefix += selection::render(tmpl, values) + tmpl.separator;
  }
  for (const auto& t : tests) {
    result.prompts.push_back(
        {{"id", t.query.id},
         {"prompt", selection::render_prompt(sel.chosen, t.query, tmpl)}});
  }

  json sampled = json::array();
  for (std::size_t i = 0; i < sel.sampled.size(); ++i) {
    sampled.push_back({{"id", pool[sel.sampled[i]].query.id},
                       {"pool_index", sel.sampled[i]},
                       {"q_know", sel.sampled_scores[i]}});
  }
  json chosen = json::array();
  for (const auto& d : sel.chosen) {
    chosen.push_back({{"id", d.query.id}, {"pool_index", d.pool_index}, {"q_know", d.q_know}});
  }
  result.manifest = {{"config_hash", config_hash(cfg)},
                     {"template", tmpl.name},
                     {"m", m},
                     {"n", n},
                     {"seed", cfg.seed},
                     {"gamma", gamma_json(cfg.gamma)},
                     {"sampled", sampled},
                     {"chosen", chosen}};

  fs::create_directories(cfg.output_dir);
  std::ofstream(cfg.output_dir / "demonstrations.json", std::ios::trunc)
      << result.manifest.dump(2) << "\n";
  std::ofstream(cfg.output_dir / "prompt_prefix.txt", std::ios::binary | std::ios::trunc)
      << result.prefix;
  if (cfg.prompt_test_dataset) write_lines(cfg.output_dir / "prompts.jsonl", result.prompts);
  return result;
}

std::vector<Candidate> parse_candidates(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(0, fmt::format("cannot read candidates '{}'", path.string()));
  std::vector<Candidate> out;
  std::map<std::string, std::size_t> per_query;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (collapse_whitespace(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(lineno, fmt::format("malformed JSON: {}", e.what()));
    }
    if (!record.is_object()) throw SchemaError(lineno, "record is not a JSON object");
    for (const char* field : {"query_id", "text"}) {
      if (!record.contains(field) || !record[field].is_string()) {
        throw SchemaError(lineno, fmt::format("missing field '{}'", field));
      }
    }
    Candidate c{record["query_id"].get<std::string>(), "",
                record["text"].get<std::string>()};
    if (collapse_whitespace(c.text).empty()) throw SchemaError(lineno, "blank field 'text'");
    const std::size_t position = per_query[c.query_id]++;
    if (const auto it = record.find("candidate_id"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(lineno, "field 'candidate_id' must be a string");
      c.candidate_id = it->get<std::string>();
    } else {
      c.candidate_id = fmt::format("{}#{}", c.query_id, position);
    }
    out.push_back(std::move(c));
  }
  return out;
}

SelectKnowledgeResult run_select_knowledge(const RunConfig& cfg,
                                           const fs::path& candidates_path,
                                           const BackendFactory& factory) {
  require_quality_backends(cfg);
  const auto items = parse_dataset(cfg.dataset_path, cfg.format);
  const auto candidates = parse_candidates(candidates_path);
  std::map<std::string, std::vector<const Candidate*>> grouped;
  for (const auto& c : candidates) grouped[c.query_id].push_back(&c);

  BackendSet backends = connect_backends(cfg, factory);
  const auto quality = quality_fn(cfg, backends.scorer);

  SelectKnowledgeResult result;
  for (const auto& item : items) {
    const auto& q = item.query;
    const auto it = grouped.find(q.id);
    if (it == grouped.end()) {
      spdlog::error("query '{}' has no candidates", q.id);
      result.failed.push_back(q.id);
      continue;
    }
    std::vector<Knowledge> ks;
    for (const auto* c : it->second) ks.emplace_back(c->text, Provenance::kGenerated);
    try {
      const auto sel =
          selection::select_knowledge(q, ks, cfg.gamma, quality, cfg.concurrency);
      json scores = json::array();
      for (std::size_t i = 0; i < ks.size(); ++i) {
        scores.push_back({{"candidate_id", it->second[i]->candidate_id},
                          {"q_know", sel.scores[i]}});
      }
      result.selections.push_back(
          {{"query_id", q.id},
           {"chosen", it->second[sel.index]->candidate_id},
           {"chosen_index", sel.index},
           {"scores", scores}});
    } catch (const Error& e) {
      spdlog::error("query '{}' failed: {}", q.id, e.what());
      result.failed.push_back(q.id);
    }
  }
  for (const auto& [query_id, _] : grouped) {
    const bool known = std::any_of(items.begin(), items.end(),
                                   [&](const EvalItem& i) { return i.query.id == query_id; });
    if (!known) spdlog::warn("candidates for unknown query '{}' ignored", query_id);
  }

  fs::create_directories(cfg.output_dir);
  write_lines(cfg.output_dir / "knowledge_selection.jsonl", result.selections);
  std::ofstream(cfg.output_dir / "knowledge_selection_failed.json", std::ios::trunc)
      << json(result.failed).dump(2) << "\n";
  return result;
}

}  // namespace conner::cli
