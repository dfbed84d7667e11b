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

#include "conner/intrinsic/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "conner/core/error.hpp"

namespace conner::intrinsic {

void FactualityConfig::validate() const {
  if (l < 1) throw InvalidArgument("factuality: l must be >= 1");
}

NliVector select_by_entail(std::span<const NliVector> results) {
  if (results.empty()) return NliVector::non_verified();
  std::size_t best = 0;
  for (std::size_t j = 1; j < results.size(); ++j) {
    if (results[j].entail() > results[best].entail()) best = j;
  }
  return results[best];
}

FactualityScore aggregate_factuality(std::span<const NliVector> per_sentence,
                                     FactualityMode mode) {
  if (per_sentence.empty()) {
    throw InvalidArgument("factuality: knowledge has no sentences");
  }
  switch (mode) {
    case FactualityMode::kMin: {
      std::size_t pick = 0;
      for (std::size_t i = 1; i < per_sentence.size(); ++i) {
        if (per_sentence[i].entail() < per_sentence[pick].entail()) pick = i;
      }
      return {per_sentence[pick], mode};
    }
    case FactualityMode::kMax: {
      std::size_t pick = 0;
      for (std::size_t i = 1; i < per_sentence.size(); ++i) {
        if (per_sentence[i].entail() > per_sentence[pick].entail()) pick = i;
      }
      return {per_sentence[pick], mode};
    }
    case FactualityMode::kMean: {
      double e = 0.0, n = 0.0, c = 0.0;
      for (const auto& v : per_sentence) {
        e += v.entail();
        n += v.neutral();
        c += v.contradict();
      }
      const auto m = static_cast<double>(per_sentence.size());
      return {NliVector(e / m, n / m, c / m), mode};
    }
  }
  throw InvalidArgument("factuality: unknown mode");
}

FactualityScore factuality_from_grid(
    const std::vector<std::vector<NliVector>>& grid, FactualityMode mode) {
  std::vector<NliVector> per_sentence;
  per_sentence.reserve(grid.size());
  for (const auto& row : grid) per_sentence.push_back(select_by_entail(row));
  return aggregate_factuality(per_sentence, mode);
}

double sentence_cohesion(std::span<const std::vector<double>> per_sentence) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& lp : per_sentence) {
    if (lp.empty()) continue;
    double sum = 0.0;
    for (double v : lp) sum += v;
    // 1 / PPL = exp(mean logprob).
    total += std::exp(sum / static_cast<double>(lp.size()));
    ++counted;
  }
  if (counted == 0) {
    throw InvalidArgument("coherence: no sentence has any token");
  }
  return total / static_cast<double>(counted);
}

double logistic(double raw) { return 1.0 / (1.0 + std::exp(-raw)); }

double informativeness_from_logprobs(std::span<const double> logprobs) {
  if (logprobs.empty()) {
    throw InvalidArgument("informativeness: knowledge has no tokens");
  }
  double sum = 0.0;
  for (double v : logprobs) sum += v;
  return 1.0 - std::exp(sum / static_cast<double>(logprobs.size()));
}

EvidenceSets gather_evidence(const Scorer& scorer, const Knowledge& k,
                             const FactualityConfig& cfg) {
  cfg.validate();
  if (k.sentences().empty()) {
    throw InvalidArgument("gather_evidence: knowledge has no sentences");
  }
  EvidenceSets out;
  out.per_sentence.reserve(k.sentences().size());
  for (const auto& s : k.sentences()) {
    out.per_sentence.push_back(scorer.retrieve(s.text, cfg.l));
  }
  return out;
}

NliVector sentence_factuality(const Scorer& scorer, const Sentence& s,
                              std::span<const Evidence> evidence) {
  if (evidence.empty()) return NliVector::non_verified();
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(evidence.size());
  for (const auto& e : evidence) pairs.emplace_back(e.text, s.text);
  const auto results = scorer.nli_batch(pairs);
  return select_by_entail(results);
}

FactualityScore factuality(const Scorer& scorer, const Knowledge& k,
                           const EvidenceSets& evidence,
                           const FactualityConfig& cfg) {
  cfg.validate();
  const auto& sentences = k.sentences();
  if (sentences.empty()) {
    throw InvalidArgument("factuality: knowledge has no sentences");
  }
  if (evidence.per_sentence.size() != sentences.size()) {
    throw InvalidArgument(fmt::format(
        "factuality: {} evidence lists for {} sentences",
        evidence.per_sentence.size(), sentences.size()));
  }
  std::vector<NliVector> per_sentence;
  per_sentence.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    per_sentence.push_back(
        sentence_factuality(scorer, sentences[i], evidence.per_sentence[i]));
  }
  return aggregate_factuality(per_sentence, cfg.mode);
}

double relevance(const Scorer& scorer, const Query& q, const Knowledge& k) {
  return std::clamp(scorer.rank(q.text, k.text()), 0.0, 1.0);
}

double coherence_sentence(const Scorer& scorer, const Knowledge& k) {
  if (k.sentences().empty()) {
    throw InvalidArgument("coherence: knowledge has no sentences");
  }
  std::vector<std::vector<double>> per_sentence;
  per_sentence.reserve(k.sentences().size());
  for (const auto& s : k.sentences()) {
    per_sentence.push_back(scorer.token_logprobs("", s.text).logprobs);
  }
  return sentence_cohesion(per_sentence);
}

double coherence_paragraph(const Scorer& scorer, const Knowledge& k) {
  if (k.sentences().empty()) {
    throw InvalidArgument("coherence: knowledge has no sentences");
  }
  std::vector<std::string> texts;
  texts.reserve(k.sentences().size());
  for (const auto& s : k.sentences()) texts.push_back(s.text);
  return logistic(scorer.discourse_raw(texts));
}

selection::TemplateValues query_values(const Query& q) {
  selection::TemplateValues values{{"query", q.text}, {"utterance", q.text}};
  if (q.topic) values["topic"] = *q.topic;
  return values;
}

double informativeness(const Scorer& scorer, const Query& q, const Knowledge& k,
                       const selection::PromptTemplate& context_template) {
  const std::string context = selection::render(context_template, query_values(q));
  const auto lp = scorer.token_logprobs(context, k.text());
  return informativeness_from_logprobs(lp.logprobs);
}

}  // namespace conner::intrinsic
