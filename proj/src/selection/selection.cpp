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

#include "conner/selection/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/parallel.hpp"
#include "conner/core/random.hpp"

namespace conner::selection {

Gamma::Gamma(double w_fact, double w_rel, double w_coh, double w_info)
    : w_{w_fact, w_rel, w_coh, w_info} {
  for (double w : w_) {
    if (!std::isfinite(w)) throw InvalidArgument("gamma weights must be finite");
  }
  if (std::all_of(w_.begin(), w_.end(), [](double w) { return w == 0.0; })) {
    throw InvalidArgument("gamma must have at least one non-zero weight");
  }
}

Gamma Gamma::scaled(double c) const {
  return {w_[0] * c, w_[1] * c, w_[2] * c, w_[3] * c};
}

Gamma Gamma::operator+(const Gamma& other) const {
  return {w_[0] + other.w_[0], w_[1] + other.w_[1], w_[2] + other.w_[2],
          w_[3] + other.w_[3]};
}

double q_know(const Gamma& gamma, const IntrinsicScores& s) {
  return gamma.w_fact() * s.fact_consistent + gamma.w_rel() * s.rel +
         gamma.w_coh() * s.coh_para + gamma.w_info() * s.info;
}

IntrinsicScores intrinsic_scores(const backend::Scorer& scorer, const Query& q,
                                 const Knowledge& k, const QualityConfig& cfg) {
  const auto evidence = intrinsic::gather_evidence(scorer, k, cfg.factuality);
  IntrinsicScores s;
  s.fact_consistent =
      intrinsic::factuality(scorer, k, evidence, cfg.factuality).fact_consistent();
  s.rel = intrinsic::relevance(scorer, q, k);
  s.coh_para = intrinsic::coherence_paragraph(scorer, k);
  s.info = intrinsic::informativeness(scorer, q, k, cfg.informativeness_template);
  return s;
}

DemonstrationSelection select_demonstrations(std::span<const PoolEntry> pool,
                                             std::size_t m, std::size_t n,
                                             const Gamma& gamma, std::uint64_t seed,
                                             const QualityFn& quality, int threads) {
  if (n < 1 || m < 1) {
    throw InvalidArgument("select_demonstrations: m and n must be positive");
  }
  if (n > m) {
    throw InvalidArgument(fmt::format("select_demonstrations: n = {} > m = {}", n, m));
  }
  if (m > pool.size()) {
    throw InvalidArgument(fmt::format(
        "select_demonstrations: m = {} exceeds pool size {}", m, pool.size()));
  }
  DemonstrationSelection out;
  out.sampled = sample_indices(pool.size(), m, seed);
  out.sampled_scores.resize(m);
  parallel_for(m, threads, [&](std::size_t i) {
    const auto& entry = pool[out.sampled[i]];
    out.sampled_scores[i] = q_know(gamma, quality(entry.query, entry.knowledge));
  });

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.sampled_scores[a] > out.sampled_scores[b];
  });
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    const auto& entry = pool[out.sampled[i]];
    out.chosen.push_back(
        {entry.query, entry.knowledge, out.sampled_scores[i], out.sampled[i]});
  }
  return out;
}

KnowledgeSelection select_knowledge(const Query& q,
                                    std::span<const Knowledge> candidates,
                                    const Gamma& gamma, const QualityFn& quality,
                                    int threads) {
  if (candidates.empty()) {
    throw InvalidArgument(
        fmt::format("select_knowledge: query '{}' has no candidates", q.id));
  }
  KnowledgeSelection out;
  out.scores.resize(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    out.scores[i] = q_know(gamma, quality(q, candidates[i]));
  });
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i] > out.scores[out.index]) out.index = i;
  }
  return out;
}

std::string render_prompt(std::span<const Demonstration> demos, const Query& test,
                          const PromptTemplate& tmpl) {
  std::string prompt;
  for (const auto& d : demos) {
    auto values = intrinsic::query_values(d.query);
    values["knowledge"] = d.knowledge.text();
    prompt += render(tmpl, values);
    prompt += tmpl.separator;
  }
  prompt += render(tmpl, intrinsic::query_values(test), "knowledge");
  return prompt;
}

}  // namespace conner::selection
