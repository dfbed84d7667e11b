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

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "conner/backend/scorer.hpp"
#include "conner/core/types.hpp"
#include "conner/intrinsic/intrinsic.hpp"
#include "conner/selection/template.hpp"

// Knowledge quality as a weighted sum of the intrinsic scores, and the two
// ways it is used: picking few-shot demonstrations and picking one of several
// generated knowledge candidates.
namespace conner::selection {

// Weights for (factuality, relevance, paragraph coherence, informativeness).
class Gamma {
 public:
  Gamma(double w_fact, double w_rel, double w_coh, double w_info);

  static Gamma uniform() { return {0.25, 0.25, 0.25, 0.25}; }

  double w_fact() const noexcept { return w_[0]; }
  double w_rel() const noexcept { return w_[1]; }
  double w_coh() const noexcept { return w_[2]; }
  double w_info() const noexcept { return w_[3]; }
  const std::array<double, 4>& weights() const noexcept { return w_; }

  Gamma scaled(double c) const;
  Gamma operator+(const Gamma& other) const;

 private:
  std::array<double, 4> w_;
};

struct IntrinsicScores {
  double fact_consistent = 0.0;
  double rel = 0.0;
  double coh_para = 0.0;
  double info = 0.0;
};

double q_know(const Gamma& gamma, const IntrinsicScores& scores);

// How a (query, knowledge) pair is turned into IntrinsicScores. Must be safe
// to call from several threads.
using QualityFn = std::function<IntrinsicScores(const Query&, const Knowledge&)>;

struct QualityConfig {
  intrinsic::FactualityConfig factuality;
  PromptTemplate informativeness_template;
  int threads = 1;
};

// Runs the four intrinsic metrics against the scorer.
IntrinsicScores intrinsic_scores(const backend::Scorer& scorer, const Query& q,
                                 const Knowledge& k, const QualityConfig& cfg);

struct PoolEntry {
  Query query;
  Knowledge knowledge;
};

struct Demonstration {
  Query query;
  Knowledge knowledge;
  double q_know = 0.0;
  std::size_t pool_index = 0;
};

struct DemonstrationSelection {
  std::vector<std::size_t> sampled;  // pool indices, in sampled order
  std::vector<double> sampled_scores;
  std::vector<Demonstration> chosen;  // top n, descending q_know
};

inline constexpr std::size_t kDefaultSampleSize = 30;
inline constexpr std::size_t kDefaultDemonstrations = 8;

// Samples m pool entries (seeded, without replacement), scores them and keeps
// the n best. Ties keep sampled order.
DemonstrationSelection select_demonstrations(std::span<const PoolEntry> pool,
                                             std::size_t m, std::size_t n,
                                             const Gamma& gamma, std::uint64_t seed,
                                             const QualityFn& quality,
                                             int threads = 1);

struct KnowledgeSelection {
  std::size_t index = 0;
  std::vector<double> scores;  // aligned with the candidates
};

// argmax of q_know over the candidates; ties go to the lowest index.
KnowledgeSelection select_knowledge(const Query& q,
                                    std::span<const Knowledge> candidates,
                                    const Gamma& gamma, const QualityFn& quality,
                                    int threads = 1);

// Demonstrations rendered in full, then the test query with its knowledge
// slot left open, joined by the template separator.
std::string render_prompt(std::span<const Demonstration> demos, const Query& test,
                          const PromptTemplate& tmpl);

}  // namespace conner::selection
