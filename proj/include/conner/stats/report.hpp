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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conner/core/types.hpp"
#include "conner/stats/somers.hpp"

namespace conner::stats {

enum class FactLabel { kConsistent, kNonVerified, kInconsistent };

// Argmax component of the factuality vector. Ties go to the more severe
// label: inconsistent over non-verified over consistent.
FactLabel classify(const FactualityScore& score);

struct GroupKey {
  std::string model;
  std::string setting;

  bool operator==(const GroupKey&) const = default;
};

struct FactualityBreakdown {
  double consistent_pct = 0.0;
  double non_verified_pct = 0.0;
  double inconsistent_pct = 0.0;
};

// One row of the corpus table. Columns whose metric was not computed for any
// item of the group stay empty.
struct CorpusRow {
  GroupKey group;
  std::optional<FactualityBreakdown> fact;
  std::optional<double> relevance_mean;
  std::optional<double> coh_sent_mean;
  std::optional<double> coh_para_mean;
  std::optional<double> info_mean;
  std::optional<double> helpfulness_mean;
  std::optional<double> validity_pct;  // 100 x mean validity
  std::size_t item_count = 0;
};

struct CorpusReport {
  std::vector<CorpusRow> rows;
  std::vector<std::string> warnings;
};

// cards[i] belongs to keys[i]. Rows follow `groups` when given (groups
// without cards are omitted with a warning), else first appearance.
CorpusReport corpus_report(std::span<const ScoreCard> cards,
                           std::span<const GroupKey> keys,
                           std::span<const GroupKey> groups = {});

// Markdown table: percentages with two decimals and a '%', unit-interval
// scores with four decimals, '-' for empty cells.
std::string render_markdown(const CorpusReport& report);
// Model | Helpfulness | Validity, for before/after comparisons.
std::string render_extrinsic_markdown(std::span<const CorpusRow> rows);
nlohmann::json to_json(const CorpusReport& report);

std::string format_pct(double pct);
std::string format_unit(double v);

struct CorrelationRow {
  std::string metric;
  CorrelationResult result;
};

inline constexpr double kSignificanceLevel = 0.05;

// d with two decimals, marked with a dagger when p < 0.05.
std::string render_correlation_markdown(std::span<const CorrelationRow> rows);
nlohmann::json to_json(std::span<const CorrelationRow> rows);

}  // namespace conner::stats
