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

#include <fstream>
#include <map>
#include <set>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "conner/cli/dataset.hpp"
#include "conner/cli/run.hpp"
#include "conner/core/error.hpp"
#include "conner/core/random.hpp"
#include "conner/core/text.hpp"

namespace conner::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::map<std::string, json> load_scores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(0, fmt::format("cannot read scores '{}'", path.string()));
  std::map<std::string, json> out;
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
    if (!record.is_object() || !record.contains("id") || !record["id"].is_string()) {
      throw SchemaError(lineno, "missing field 'id'");
    }
    if (!record.contains("scores") || !record["scores"].is_object()) {
      throw SchemaError(lineno, "missing field 'scores'");
    }
    const auto id = record["id"].get<std::string>();
    if (!out.emplace(id, record["scores"]).second) {
      throw SchemaError(lineno, fmt::format("duplicate id '{}'", id));
    }
  }
  return out;
}

std::optional<double> metric_value(const json& scores, Metric metric) {
  const auto name = std::string(to_string(metric));
  const auto it = scores.find(name);
  if (it == scores.end() || it->is_null()) return std::nullopt;
  if (metric == Metric::kFact) return it->at("fact_consistent").get<double>();
  return it->get<double>();
}

std::string id_list(const std::vector<std::string>& ids) {
  return fmt::format("{}", fmt::join(ids, ", "));
}

}  // namespace

std::string rating_key(Metric metric) {
  switch (metric) {
    case Metric::kFact: return "factuality";
    case Metric::kRel: return "relevance";
    case Metric::kCohSent:
    case Metric::kCohPara: return "coherence";
    case Metric::kInfo: return "informativeness";
    case Metric::kHelp: return "helpfulness";
    case Metric::kValidity: return "validity";
  }
  return "factuality";
}

std::vector<stats::CorrelationRow> run_correlate(const CorrelateOptions& opts) {
  if (opts.metrics.empty()) throw InvalidArgument("correlate: no metrics given");
  const auto scores = load_scores(opts.scores);
  const auto ratings = parse_annotations(opts.annotations);

  std::vector<std::string> only_scores, only_ratings;
  for (const auto& [id, _] : scores) {
    if (!ratings.contains(id)) only_scores.push_back(id);
  }
  for (const auto& [id, _] : ratings) {
    if (!scores.contains(id)) only_ratings.push_back(id);
  }
  if (!only_scores.empty() || !only_ratings.empty()) {
    std::string msg = "item ids do not align";
    if (!only_ratings.empty()) msg += "; missing from scores: " + id_list(only_ratings);
    if (!only_scores.empty()) msg += "; missing from annotations: " + id_list(only_scores);
    throw SchemaError(0, msg);
  }

  std::vector<stats::CorrelationRow> rows;
  for (Metric metric : opts.metrics) {
    const auto key = rating_key(metric);
    std::vector<double> x;
    std::vector<int> y;
    std::vector<std::string> missing;
    for (const auto& [id, s] : scores) {
      const auto value = metric_value(s, metric);
      const auto& r = ratings.at(id);
      const auto rating = r.find(key);
      if (!value || rating == r.end()) {
        missing.push_back(id);
        continue;
      }
      x.push_back(*value);
      y.push_back(rating->second);
    }
    if (!missing.empty()) {
      throw SchemaError(0, fmt::format("metric '{}' lacks a score or '{}' rating for: {}",
                                        to_string(metric), key, id_list(missing)));
    }
    auto sample = stats::PairedSample::make(std::move(x), std::move(y));
    rows.push_back({std::string(to_string(metric)),
                    stats::correlate(sample, opts.permutations,
                                     derive_seed(opts.seed, to_string(metric)))});
  }

  if (opts.output_dir) {
    fs::create_directories(*opts.output_dir);
    std::ofstream(*opts.output_dir / "correlation.json", std::ios::trunc)
        << stats::to_json(rows).dump(2) << "\n";
    std::ofstream(*opts.output_dir / "correlation.md", std::ios::trunc)
        << stats::render_correlation_markdown(rows);
  }
  return rows;
}

}  // namespace conner::cli
