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

#include "conner/extrinsic/extrinsic.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/random.hpp"
#include "conner/intrinsic/intrinsic.hpp"

namespace conner::extrinsic {

double helpfulness_score(double loss, std::span<const double> baseline_losses) {
  if (baseline_losses.empty()) {
    throw InvalidArgument("helpfulness: need at least one baseline loss");
  }
  if (loss < 0.0) throw InvalidArgument("helpfulness: negative loss");
  double sum = 0.0;
  for (double b : baseline_losses) {
    if (b < 0.0) throw InvalidArgument("helpfulness: negative baseline loss");
    sum += b;
  }
  const double mean = sum / static_cast<double>(baseline_losses.size());
  if (mean == 0.0) return 0.0;
  return std::max(0.0, 1.0 - loss / mean);
}

double helpfulness_score(const AnswerLoss& loss, std::span<const AnswerLoss> baselines,
                         LossAggregation aggregation) {
  auto value = [aggregation](const AnswerLoss& l) {
    return aggregation == LossAggregation::kSum ? l.total_nll : l.mean_nll();
  };
  std::vector<double> base;
  base.reserve(baselines.size());
  for (const auto& b : baselines) base.push_back(value(b));
  return helpfulness_score(value(loss), base);
}

AnswerLoss answer_loss(const Scorer& scorer, const Query& q, const Knowledge& k,
                       const Answer& a, const selection::PromptTemplate& tmpl) {
  if (a.text.empty()) throw InvalidArgument("answer_loss: empty answer");
  const std::string_view slot = tmpl.has("answer") ? "answer" : "response";
  auto values = intrinsic::query_values(q);
  values["knowledge"] = k.text();
  const std::string context = selection::render(tmpl, values, slot);
  const auto lp = scorer.token_logprobs(context, a.text);
  if (lp.logprobs.empty()) {
    throw InvalidArgument("answer_loss: answer has no tokens");
  }
  AnswerLoss loss;
  for (double v : lp.logprobs) loss.total_nll -= v;
  loss.token_count = lp.logprobs.size();
  return loss;
}

NegativeSet sample_negatives(std::span<const Knowledge> pool, const Knowledge& k,
                             std::size_t u, std::uint64_t seed) {
  if (u < 1) throw InvalidArgument("sample_negatives: u must be >= 1");
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].text() != k.text()) eligible.push_back(i);
  }
  if (eligible.size() < u) {
    throw InvalidArgument(fmt::format(
        "sample_negatives: need u = {} entries distinct from the knowledge, pool "
        "has {}",
        u, eligible.size()));
  }
  NegativeSet out;
  out.seed = seed;
  for (std::size_t idx : sample_indices(eligible.size(), u, seed)) {
    out.negatives.push_back(pool[eligible[idx]]);
  }
  return out;
}

double helpfulness(const Scorer& scorer, const Query& q, const Answer& a,
                   const Knowledge& k, const NegativeSet& negatives,
                   const selection::PromptTemplate& tmpl) {
  const AnswerLoss loss = answer_loss(scorer, q, k, a, tmpl);
  std::vector<AnswerLoss> baselines;
  baselines.reserve(negatives.negatives.size());
  for (const auto& neg : negatives.negatives) {
    baselines.push_back(answer_loss(scorer, q, neg, a, tmpl));
  }
  return helpfulness_score(loss, baselines);
}

double validity_span(const Scorer& scorer, const Query& q, const Answer& a,
                     std::span<const Answer> references) {
  if (a.kind != AnswerKind::kSpan) {
    throw InvalidArgument("validity_span: answer is not a span answer");
  }
  if (references.empty()) {
    throw InvalidArgument("validity_span: missing reference answer");
  }
  const std::string hypothesis = q.text + " " + a.text;
  double best = 0.0;
  for (const auto& ref : references) {
    best = std::max(best, scorer.nli(q.text + " " + ref.text, hypothesis).entail());
  }
  return best;
}

double validity_open(const Scorer& scorer, const Answer& a, std::size_t l) {
  if (a.kind != AnswerKind::kOpenEnded) {
    throw InvalidArgument("validity_open: answer is not open-ended");
  }
  const auto evidence = scorer.retrieve(a.text, l);
  if (evidence.empty()) return 0.0;
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(evidence.size());
  for (const auto& e : evidence) pairs.emplace_back(e.text, a.text);
  double best = 0.0;
  for (const auto& v : scorer.nli_batch(pairs)) best = std::max(best, v.entail());
  return best;
}

}  // namespace conner::extrinsic
