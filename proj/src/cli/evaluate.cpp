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
#include <functional>
#include <string>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "conner/core/error.hpp"
#include "conner/core/parallel.hpp"
#include "conner/core/random.hpp"
#include "conner/extrinsic/extrinsic.hpp"
#include "conner/intrinsic/intrinsic.hpp"
#include "conner/cli/dataset.hpp"
#include "conner/cli/run.hpp"
#include "conner/selection/template.hpp"

namespace conner::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct ItemOutcome {
  ScoreCard card;
  json evidence_used = json::array();
  std::vector<std::string> errors;
};

struct Templates {
  selection::PromptTemplate informativeness;
  selection::PromptTemplate answer;
};

json fact_json(const FactualityScore& f) {
  return {{"fact_consistent", f.fact_consistent()},
          {"non_verified", f.non_verified()},
          {"fact_inconsistent", f.fact_inconsistent()},
          {"mode", to_string(f.mode)}};
}

json scores_json(const ScoreCard& c) {
  json s = json::object();
  if (c.fact) s["fact"] = fact_json(*c.fact);
  if (c.rel) s["rel"] = *c.rel;
  if (c.coh_sent) s["coh_sent"] = *c.coh_sent;
  if (c.coh_para) s["coh_para"] = *c.coh_para;
  if (c.info) s["info"] = *c.info;
  if (c.help) s["help"] = *c.help;
  if (c.validity) s["validity"] = *c.validity;
  return s;
}

// Helpfulness is measured on the gold answer when there is one.
const Answer* help_target(const EvalItem& item) {
  if (!item.reference_answers.empty()) return &item.reference_answers.front();
  if (item.answer) return &*item.answer;
  return nullptr;
}

void run_metric(ItemOutcome& out, Metric metric, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    out.errors.push_back(fmt::format("{}: {}", to_string(metric), e.what()));
  }
}

ItemOutcome score_item(const RunConfig& cfg, const backend::Scorer& scorer,
                       const Templates& templates, const EvalItem& item,
                       std::span<const Knowledge> pool) {
  ItemOutcome out;
  const auto& q = item.query;
  const auto& k = item.knowledge;
  for (Metric metric : cfg.metrics) {
    switch (metric) {
      case Metric::kFact:
        run_metric(out, metric, [&] {
          const auto evidence = intrinsic::gather_evidence(scorer, k, cfg.factuality);
          out.card.fact = intrinsic::factuality(scorer, k, evidence, cfg.factuality);
          for (std::size_t i = 0; i < evidence.per_sentence.size(); ++i) {
            json ids = json::array();
            for (const auto& e : evidence.per_sentence[i]) ids.push_back(e.source_id);
            out.evidence_used.push_back({{"sentence", i}, {"source_ids", ids}});
          }
        });
        break;
      case Metric::kRel:
        run_metric(out, metric, [&] { out.card.rel = intrinsic::relevance(scorer, q, k); });
        break;
      case Metric::kCohSent:
        run_metric(out, metric,
                   [&] { out.card.coh_sent = intrinsic::coherence_sentence(scorer, k); });
        break;
      case Metric::kCohPara:
        run_metric(out, metric,
                   [&] { out.card.coh_para = intrinsic::coherence_paragraph(scorer, k); });
        break;
      case Metric::kInfo:
        run_metric(out, metric, [&] {
          out.card.info = intrinsic::informativeness(scorer, q, k, templates.informativeness);
        });
        break;
      case Metric::kHelp: {
        const Answer* target = help_target(item);
        if (!target) break;
        run_metric(out, metric, [&] {
          const auto negatives = extrinsic::sample_negatives(
              pool, k, cfg.negatives, derive_seed(cfg.seed, q.id));
          out.card.help =
              extrinsic::helpfulness(scorer, q, *target, k, negatives, templates.answer);
        });
        break;
      }
      case Metric::kValidity:
        if (!item.answer) break;
        if (item.answer->kind == AnswerKind::kSpan) {
          if (item.reference_answers.empty()) break;
          run_metric(out, metric, [&] {
            out.card.validity =
                extrinsic::validity_span(scorer, q, *item.answer, item.reference_answers);
          });
        } else {
          run_metric(out, metric, [&] {
            out.card.validity = extrinsic::validity_open(scorer, *item.answer, cfg.validity_l);
          });
        }
        break;
    }
  }
  if (out.errors.empty()) {
    try {
      out.card.validate();
    } catch (const InvalidArgument& e) {
      out.errors.push_back(e.what());
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  f << text;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return backend::sha256_hex(data);
}

}  // namespace

EvaluateResult run_evaluate(const RunConfig& cfg, const BackendFactory& factory) {
  auto items = parse_dataset(cfg.dataset_path, cfg.format);
  std::sort(items.begin(), items.end(),
            [](const EvalItem& a, const EvalItem& b) { return a.query.id < b.query.id; });

  Templates templates{
      selection::load_template(cfg.templates.informativeness, cfg.templates.dir),
      selection::load_template(cfg.templates.answer, cfg.templates.dir)};

  BackendSet backends = connect_backends(cfg, factory);

  std::vector<Knowledge> pool;
  pool.reserve(items.size());
  for (const auto& item : items) pool.push_back(item.knowledge);

  std::vector<ItemOutcome> outcomes(items.size());
  parallel_for(items.size(), cfg.concurrency, [&](std::size_t i) {
    outcomes[i] = score_item(cfg, backends.scorer, templates, items[i], pool);
  });

  EvaluateResult result;
  std::vector<ScoreCard> cards;
  std::vector<stats::GroupKey> keys;
  json failed_ids = json::array();
  std::string items_text;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& o = outcomes[i];
    json line = {{"id", items[i].query.id},
                 {"scores", scores_json(o.card)},
                 {"evidence_used", o.evidence_used},
                 {"errors", o.errors}};
    items_text += line.dump() + "\n";
    result.items.push_back(std::move(line));
    if (o.errors.empty()) {
      cards.push_back(o.card);
      keys.push_back(cfg.group);
    } else {
      ++result.failed;
      failed_ids.push_back(items[i].query.id);
      spdlog::error("item '{}' failed: {}", items[i].query.id, o.errors.front());
    }
  }
  const stats::GroupKey group = cfg.group;
  result.report = stats::corpus_report(cards, keys, std::span(&group, 1));

  json backend_ids = json::object();
  for (const auto& [endpoint, bc] : cfg.backends) {
    backend_ids[std::string(backend::to_string(endpoint))] = bc.backend_id;
  }
  const std::size_t hits = backends.cache_hits();
  const std::size_t misses = backends.cache_misses();
  result.manifest = {
      {"config_hash", config_hash(cfg)},
      {"dataset_sha256", file_digest(cfg.dataset_path)},
      {"seed", cfg.seed},
      {"backends", backend_ids},
      {"items", items.size()},
      {"failed_items", failed_ids},
      {"cache", {{"hits", hits},
                 {"misses", misses},
                 {"hit_rate", hits + misses == 0
                                  ? 1.0
                                  : static_cast<double>(hits) /
                                        static_cast<double>(hits + misses)}}},
      {"backend_calls", backends.backend_calls()},
      {"config", to_json(cfg)},
  };
  result.manifest["config"].erase("output_dir");
  result.manifest["config"].erase("cache_dir");

  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "items.jsonl", items_text);
  write_text(cfg.output_dir / "report.json", stats::to_json(result.report).dump(2) + "\n");
  write_text(cfg.output_dir / "report.md", stats::render_markdown(result.report));
  write_text(cfg.output_dir / "manifest.json", result.manifest.dump(2) + "\n");
  return result;
}

}  // namespace conner::cli
