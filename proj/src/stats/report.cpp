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

#include "conner/stats/report.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "conner/core/error.hpp"

namespace conner::stats {
namespace {

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;

  void add(const std::optional<double>& v) {
    if (!v) return;
    sum += *v;
    ++n;
  }
  std::optional<double> value(double scale = 1.0) const {
    if (n == 0) return std::nullopt;
    return scale * sum / static_cast<double>(n);
  }
};

std::string cell_pct(const std::optional<double>& v) {
  return v ? format_pct(*v) : "-";
}

std::string cell_unit(const std::optional<double>& v) {
  return v ? format_unit(*v) : "-";
}

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

CorpusRow build_row(const GroupKey& key, std::span<const ScoreCard> cards,
                    std::span<const GroupKey> keys) {
  CorpusRow row;
  row.group = key;
  std::size_t counts[3] = {0, 0, 0};
  std::size_t fact_n = 0;
  Mean rel, coh_sent, coh_para, info, help, validity;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    if (!(keys[i] == key)) continue;
    const auto& c = cards[i];
    ++row.item_count;
    if (c.fact) {
      ++counts[static_cast<int>(classify(*c.fact))];
      ++fact_n;
    }
    rel.add(c.rel);
    coh_sent.add(c.coh_sent);
    coh_para.add(c.coh_para);
    info.add(c.info);
    help.add(c.help);
    validity.add(c.validity);
  }
  if (fact_n > 0) {
    const auto n = static_cast<double>(fact_n);
    row.fact = FactualityBreakdown{100.0 * static_cast<double>(counts[0]) / n,
                                   100.0 * static_cast<double>(counts[1]) / n,
                                   100.0 * static_cast<double>(counts[2]) / n};
  }
  row.relevance_mean = rel.value();
  row.coh_sent_mean = coh_sent.value();
  row.coh_para_mean = coh_para.value();
  row.info_mean = info.value();
  row.helpfulness_mean = help.value();
  row.validity_pct = validity.value(100.0);
  return row;
}

}  // namespace

FactLabel classify(const FactualityScore& score) {
  const double e = score.fact_consistent();
  const double n = score.non_verified();
  const double c = score.fact_inconsistent();
  if (c >= e && c >= n) return FactLabel::kInconsistent;
  if (n >= e) return FactLabel::kNonVerified;
  return FactLabel::kConsistent;
}

CorpusReport corpus_report(std::span<const ScoreCard> cards,
                           std::span<const GroupKey> keys,
                           std::span<const GroupKey> groups) {
  if (cards.size() != keys.size()) {
    throw InvalidArgument(fmt::format("corpus_report: {} cards but {} group keys",
                                      cards.size(), keys.size()));
  }
  std::vector<GroupKey> order(groups.begin(), groups.end());
  if (order.empty()) {
    for (const auto& k : keys) {
      if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
    }
  }
  CorpusReport report;
  for (const auto& key : order) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      const auto msg = fmt::format("group '{}'/'{}' has no items; omitted", key.model,
                                   key.setting);
      spdlog::warn("{}", msg);
      report.warnings.push_back(msg);
      continue;
    }
    report.rows.push_back(build_row(key, cards, keys));
  }
  return report;
}

std::string format_pct(double pct) { return fmt::format("{:.2f}%", pct); }

std::string format_unit(double v) { return fmt::format("{:.4f}", v); }

std::string render_markdown(const CorpusReport& report) {
  std::string out =
      "| Model | Setting | Fact-cons. | Non-verif. | Fact-incon. | Relevance | "
      "Coh-sent. | Coh-para. | Inform. | Helpful. | Validity |\n"
      "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    const auto f = r.fact;
    out += fmt::format(
        "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n", r.group.model,
        r.group.setting, f ? format_pct(f->consistent_pct) : "-",
        f ? format_pct(f->non_verified_pct) : "-",
        f ? format_pct(f->inconsistent_pct) : "-", cell_unit(r.relevance_mean),
        cell_unit(r.coh_sent_mean), cell_unit(r.coh_para_mean), cell_unit(r.info_mean),
        cell_unit(r.helpfulness_mean), cell_pct(r.validity_pct));
  }
  return out;
}

std::string render_extrinsic_markdown(std::span<const CorpusRow> rows) {
  std::string out = "| Model | Helpfulness | Validity |\n|---|---|---|\n";
  for (const auto& r : rows) {
    const std::string label = r.group.setting.empty()
                                  ? r.group.model
                                  : fmt::format("{} ({})", r.group.model, r.group.setting);
    out += fmt::format("| {} | {} | {} |\n", label, cell_unit(r.helpfulness_mean),
                       cell_pct(r.validity_pct));
  }
  return out;
}

nlohmann::json to_json(const CorpusReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row = {
        {"model", r.group.model},
        {"setting", r.group.setting},
        {"item_count", r.item_count},
        {"fact_consistent_pct", opt(r.fact ? std::optional(r.fact->consistent_pct) : std::nullopt)},
        {"non_verified_pct", opt(r.fact ? std::optional(r.fact->non_verified_pct) : std::nullopt)},
        {"fact_inconsistent_pct",
         opt(r.fact ? std::optional(r.fact->inconsistent_pct) : std::nullopt)},
        {"relevance_mean", opt(r.relevance_mean)},
        {"coh_sent_mean", opt(r.coh_sent_mean)},
        {"coh_para_mean", opt(r.coh_para_mean)},
        {"info_mean", opt(r.info_mean)},
        {"helpfulness_mean", opt(r.helpfulness_mean)},
        {"validity_pct", opt(r.validity_pct)},
    };
    rows.push_back(std::move(row));
  }
  return {{"rows", std::move(rows)}, {"warnings", report.warnings}};
}

std::string render_correlation_markdown(std::span<const CorrelationRow> rows) {
  std::string out = "| Metric | Somers' D | p-value | n |\n|---|---|---|---|\n";
  for (const auto& r : rows) {
    const bool significant = r.result.p_value < kSignificanceLevel;
    out += fmt::format("| {} | {:.2f}{} | {:.4f} | {} |\n", r.metric, r.result.d,
                       significant ? "†" : "", r.result.p_value, r.result.n);
  }
  return out;
}

nlohmann::json to_json(std::span<const CorrelationRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"metric", r.metric},
                   {"d", r.result.d},
                   {"p_value", r.result.p_value},
                   {"n", r.result.n},
                   {"n_permutations", r.result.n_permutations},
                   {"significant", r.result.p_value < kSignificanceLevel}});
  }
  return out;
}

}  // namespace conner::stats
