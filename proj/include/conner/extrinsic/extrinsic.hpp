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

#include <cstdint>
#include <span>
#include <vector>

#include "conner/backend/scorer.hpp"
#include "conner/core/types.hpp"
#include "conner/selection/template.hpp"

// Downstream metrics: helpfulness of knowledge for answer generation and
// validity of the generated answer.
namespace conner::extrinsic {

using backend::Scorer;

struct NegativeSet {
  std::vector<Knowledge> negatives;
  std::uint64_t seed = 0;
};

struct AnswerLoss {
  double total_nll = 0.0;  // sum of -logprob over answer tokens
  std::size_t token_count = 0;

  double mean_nll() const { return total_nll / static_cast<double>(token_count); }
};

enum class LossAggregation { kSum, kMean };

// --- kernels ---------------------------------------------------------------

// max(0, 1 - loss / mean(baselines)); a zero baseline mean scores 0.
double helpfulness_score(double loss, std::span<const double> baseline_losses);

// Same ratio over AnswerLoss values, using either token sums or token means.
double helpfulness_score(const AnswerLoss& loss, std::span<const AnswerLoss> baselines,
                         LossAggregation aggregation = LossAggregation::kSum);

// --- metrics ---------------------------------------------------------------

// Negative log-likelihood of the answer continuing the prompt rendered from
// (q, k). The template's {answer} or {response} slot is the open slot.
AnswerLoss answer_loss(const Scorer& scorer, const Query& q, const Knowledge& k,
                       const Answer& a, const selection::PromptTemplate& tmpl);

// u pool entries drawn uniformly without replacement, skipping entries whose
// text equals k's. Reproducible from seed.
NegativeSet sample_negatives(std::span<const Knowledge> pool, const Knowledge& k,
                             std::size_t u, std::uint64_t seed);

double helpfulness(const Scorer& scorer, const Query& q, const Answer& a,
                   const Knowledge& k, const NegativeSet& negatives,
                   const selection::PromptTemplate& tmpl);

// Entail component of NLI(q + " " + reference, q + " " + answer), maximised
// over the references.
double validity_span(const Scorer& scorer, const Query& q, const Answer& a,
                     std::span<const Answer> references);

// Best entail of the answer against evidence retrieved for it; 0 without
// evidence.
double validity_open(const Scorer& scorer, const Answer& a, std::size_t l);

}  // namespace conner::extrinsic
