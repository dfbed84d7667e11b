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

#include <span>
#include <vector>

#include "conner/backend/scorer.hpp"
#include "conner/core/types.hpp"
#include "conner/selection/template.hpp"

// Knowledge-only metrics: factuality, relevance, coherence, informativeness.
// The backend-driven functions are thin shells around the pure kernels below,
// which carry all of the arithmetic and are what the property tests target.
namespace conner::intrinsic {

using backend::Scorer;

struct FactualityConfig {
  std::size_t l = 10;  // evidence per sentence
  FactualityMode mode = FactualityMode::kMin;

  void validate() const;
};

// per_sentence[i] is the evidence retrieved for sentence i.
struct EvidenceSets {
  std::vector<std::vector<Evidence>> per_sentence;
};

// --- kernels ---------------------------------------------------------------

// Full vector of the entry with the highest entail component (lowest index
// on ties); (0, 1, 0) for an empty list.
NliVector select_by_entail(std::span<const NliVector> results);

// min / max keep the whole vector of the sentence with the lowest / highest
// entail (lowest index on ties); mean averages component-wise.
FactualityScore aggregate_factuality(std::span<const NliVector> per_sentence,
                                     FactualityMode mode);

// grid[i][j] = NLI(premise = evidence j of sentence i, hypothesis = sentence i).
FactualityScore factuality_from_grid(
    const std::vector<std::vector<NliVector>>& grid, FactualityMode mode);

// (1/m) sum_i exp(mean_t logprob_{i,t}), i.e. the mean inverse perplexity.
// Sentences with no tokens are skipped; all empty is an InvalidArgument.
double sentence_cohesion(std::span<const std::vector<double>> per_sentence);

double logistic(double raw);

// 1 - exp(mean logprob): one minus the geometric-mean token probability.
double informativeness_from_logprobs(std::span<const double> logprobs);

// --- metrics ---------------------------------------------------------------

EvidenceSets gather_evidence(const Scorer& scorer, const Knowledge& k,
                             const FactualityConfig& cfg);

NliVector sentence_factuality(const Scorer& scorer, const Sentence& s,
                              std::span<const Evidence> evidence);

FactualityScore factuality(const Scorer& scorer, const Knowledge& k,
                           const EvidenceSets& evidence,
                           const FactualityConfig& cfg);

double relevance(const Scorer& scorer, const Query& q, const Knowledge& k);

// Each sentence is scored with an empty context.
double coherence_sentence(const Scorer& scorer, const Knowledge& k);

double coherence_paragraph(const Scorer& scorer, const Knowledge& k);

// The query is rendered with `context_template` (a zero-shot knowledge
// prompt) and the knowledge is scored as its continuation.
double informativeness(const Scorer& scorer, const Query& q, const Knowledge& k,
                       const selection::PromptTemplate& context_template);

// Template values for a query: topic (when present), query and utterance.
selection::TemplateValues query_values(const Query& q);

}  // namespace conner::intrinsic
