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
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "conner/backend/mock.hpp"
#include "conner/core/error.hpp"
#include "conner/core/text.hpp"
#include "conner/intrinsic/intrinsic.hpp"
#include "conner/selection/template.hpp"
#include "support.hpp"

namespace conner::intrinsic {
namespace {

using backend::Endpoint;
using backend::json;
using conner::testing::ScriptedBackend;

void expect_vec(const NliVector& v, double e, double n, double c, double tol = 1e-12) {
  EXPECT_NEAR(v.entail(), e, tol);
  EXPECT_NEAR(v.neutral(), n, tol);
  EXPECT_NEAR(v.contradict(), c, tol);
}

TEST(SelectByEntail, Examples) {
  const std::vector<NliVector> one = {NliVector(0.9, 0.05, 0.05)};
  expect_vec(select_by_entail(one), 0.9, 0.05, 0.05);
  const std::vector<NliVector> two = {NliVector(0.3, 0.6, 0.1), NliVector(0.7, 0.2, 0.1)};
  expect_vec(select_by_entail(two), 0.7, 0.2, 0.1);
  expect_vec(select_by_entail({}), 0.0, 1.0, 0.0);
}

TEST(SelectByEntail, TieGoesToLowestIndex) {
  const std::vector<NliVector> tied = {NliVector(0.5, 0.5, 0.0), NliVector(0.5, 0.0, 0.5)};
  expect_vec(select_by_entail(tied), 0.5, 0.5, 0.0);
}

TEST(Aggregate, ThreeModes) {
  const std::vector<NliVector> v = {NliVector(0.9, 0.1, 0.0), NliVector(0.7, 0.2, 0.1)};
  expect_vec(aggregate_factuality(v, FactualityMode::kMin).vector, 0.7, 0.2, 0.1);
  expect_vec(aggregate_factuality(v, FactualityMode::kMean).vector, 0.8, 0.15, 0.05);
  expect_vec(aggregate_factuality(v, FactualityMode::kMax).vector, 0.9, 0.1, 0.0);
  const std::vector<NliVector> single = {NliVector(1, 0, 0)};
  for (auto mode : {FactualityMode::kMin, FactualityMode::kMean, FactualityMode::kMax}) {
    expect_vec(aggregate_factuality(single, mode).vector, 1, 0, 0);
  }
  EXPECT_THROW(aggregate_factuality({}, FactualityMode::kMin), InvalidArgument);
}

TEST(FactualityGrid, OracleAgreesWithHandExample) {
  const std::vector<std::vector<NliVector>> grid = {
      {NliVector(0.3, 0.6, 0.1), NliVector(0.9, 0.1, 0.0)},
      {NliVector(0.7, 0.2, 0.1), NliVector(0.2, 0.2, 0.6)},
      {}};
  using conner::testing::factuality_oracle;
  expect_vec(factuality_oracle(grid, FactualityMode::kMin), 0.0, 1.0, 0.0);
  expect_vec(factuality_oracle(grid, FactualityMode::kMax), 0.9, 0.1, 0.0);
  expect_vec(factuality_oracle(grid, FactualityMode::kMean), 1.6 / 3, 1.3 / 3, 0.1 / 3);
}

TEST(FactualityGrid, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto grid = conner::testing::random_grid(rng);
    double prev = -1.0;
    for (auto mode : {FactualityMode::kMin, FactualityMode::kMean, FactualityMode::kMax}) {
      const auto got = factuality_from_grid(grid, mode).vector;
      const auto want = conner::testing::factuality_oracle(grid, mode);
      expect_vec(got, want.entail(), want.neutral(), want.contradict());
      EXPECT_LE(prev, got.entail() + 1e-15);
      prev = got.entail();
    }
  }
}

TEST(FactualityGrid, EvidenceOrderDoesNotMatterWithoutTies) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<NliVector> row;
    for (int j = 0; j < 5; ++j) row.push_back(conner::testing::random_simplex(rng));
    const auto base = select_by_entail(row);
    std::shuffle(row.begin(), row.end(), rng);
    EXPECT_EQ(select_by_entail(row), base);
  }
}

std::vector<backend::Passage> corpus3() {
  return {{"a", "billy hill wrote glory of love"},
          {"b", "glory of love is a song"},
          {"c", "paris is in france"}};
}

TEST(GatherEvidence, TopLByMockJaccard) {
  Scorer scorer(std::make_shared<backend::MockBackend>(corpus3()));
  Knowledge k("Billy Hill wrote the song.");
  const auto ev = gather_evidence(scorer, k, {2, FactualityMode::kMin});
  ASSERT_EQ(ev.per_sentence.size(), 1u);
  ASSERT_EQ(ev.per_sentence[0].size(), 2u);
  // Brute-force ranking of the three passages against the sentence.
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& p : corpus3()) {
    ranked.emplace_back(-content_jaccard(k.sentences()[0].text, p.text), p.source_id);
  }
  std::sort(ranked.begin(), ranked.end());
  EXPECT_EQ(ev.per_sentence[0][0].source_id, ranked[0].second);
  EXPECT_EQ(ev.per_sentence[0][1].source_id, ranked[1].second);
}

TEST(GatherEvidence, ShapeFollowsSentences) {
  Scorer scorer(std::make_shared<backend::MockBackend>(
      std::vector<backend::Passage>{{"only", "lone passage"}}));
  Knowledge k("One here. Two here. Three here.");
  const auto ev = gather_evidence(scorer, k, {1, FactualityMode::kMin});
  ASSERT_EQ(ev.per_sentence.size(), 3u);
  for (const auto& inner : ev.per_sentence) {
    ASSERT_EQ(inner.size(), 1u);
    EXPECT_EQ(inner[0].source_id, "only");
  }
  Scorer empty(std::make_shared<backend::MockBackend>());
  for (const auto& inner : gather_evidence(empty, k, {3, FactualityMode::kMin}).per_sentence) {
    EXPECT_TRUE(inner.empty());
  }
}

TEST(Factuality, EndToEndWithMock) {
  Scorer scorer(std::make_shared<backend::MockBackend>(corpus3()));
  FactualityConfig cfg{3, FactualityMode::kMin};
  Knowledge exact("Paris is in France.");
  const auto ev = gather_evidence(scorer, exact, cfg);
  expect_vec(factuality(scorer, exact, ev, cfg).vector, 1.0, 0.0, 0.0);

  Scorer empty(std::make_shared<backend::MockBackend>());
  const auto none = gather_evidence(empty, exact, cfg);
  expect_vec(factuality(empty, exact, none, cfg).vector, 0.0, 1.0, 0.0);

  EvidenceSets wrong_shape;
  EXPECT_THROW(factuality(scorer, exact, wrong_shape, cfg), InvalidArgument);
}

TEST(Factuality, ScriptedGridThroughBackend) {
  // Sentence i vs evidence j answers from a fixed table.
  const std::vector<std::vector<NliVector>> table = {
      {NliVector(0.3, 0.6, 0.1), NliVector(0.9, 0.1, 0.0)},
      {NliVector(0.7, 0.2, 0.1), NliVector(0.2, 0.2, 0.6)}};
  auto backend = std::make_shared<ScriptedBackend>([&](Endpoint ep, const json& r) -> json {
    EXPECT_EQ(ep, Endpoint::kNli);
    const int i = r["hypothesis"].get<std::string>() == "First one." ? 0 : 1;
    const int j = r["premise"].get<std::string>() == "ev0" ? 0 : 1;
    return backend::encode(table[i][j]);
  });
  Scorer scorer(backend);
  Knowledge k("First one. Second one.");
  EvidenceSets ev;
  ev.per_sentence = {{{"ev0", "s0", 1.0}, {"ev1", "s1", 0.5}},
                     {{"ev0", "s0", 1.0}, {"ev1", "s1", 0.5}}};
  expect_vec(factuality(scorer, k, ev, {2, FactualityMode::kMin}).vector, 0.7, 0.2, 0.1);
  expect_vec(factuality(scorer, k, ev, {2, FactualityMode::kMax}).vector, 0.9, 0.1, 0.0);
  expect_vec(factuality(scorer, k, ev, {2, FactualityMode::kMean}).vector, 0.8, 0.15, 0.05);
}

TEST(Relevance, MockJaccard) {
  Scorer scorer(std::make_shared<backend::MockBackend>());
  const auto q = Query::make("q", "who wrote song");
  EXPECT_DOUBLE_EQ(relevance(scorer, q, Knowledge("who wrote song")), 1.0);
  EXPECT_DOUBLE_EQ(relevance(scorer, q, Knowledge("song wrote billy hill")), 0.4);
}

TEST(CoherenceSentence, PerplexityFixtures) {
  // Sentence one has PPL 2, sentence two PPL 4.
  auto backend = std::make_shared<ScriptedBackend>([](Endpoint, const json& r) -> json {
    EXPECT_EQ(r["context"], "");
    if (r["continuation"] == "Alpha beta.") {
      return conner::testing::logprob_response({-std::log(2.0), -std::log(2.0)});
    }
    return conner::testing::logprob_response({-std::log(4.0)});
  });
  Scorer scorer(backend);
  EXPECT_NEAR(coherence_sentence(scorer, Knowledge("Alpha beta. Gamma.")), 0.375, 1e-12);
}

TEST(CoherenceSentence, CertaintyAndMockClosedForm) {
  auto certain = std::make_shared<ScriptedBackend>(
      [](Endpoint, const json&) { return conner::testing::logprob_response({0.0, 0.0}); });
  EXPECT_EQ(coherence_sentence(Scorer(certain), Knowledge("Sure thing.")), 1.0);
  Scorer mock(std::make_shared<backend::MockBackend>());
  EXPECT_NEAR(coherence_sentence(mock, Knowledge("Cats purr loudly. Dogs bark.")),
              std::exp(-2.0), 1e-12);
}

TEST(CoherenceSentence, ZeroTokenSentencesAreSkipped) {
  auto backend = std::make_shared<ScriptedBackend>([](Endpoint, const json& r) -> json {
    if (r["continuation"] == "Empty.") return conner::testing::logprob_response({});
    return conner::testing::logprob_response({-std::log(2.0)});
  });
  Scorer scorer(backend);
  EXPECT_NEAR(coherence_sentence(scorer, Knowledge("Empty. Half.")), 0.5, 1e-12);
  EXPECT_THROW(coherence_sentence(scorer, Knowledge("Empty.")), InvalidArgument);
}

TEST(CoherenceParagraph, LogisticOfRaw) {
  EXPECT_DOUBLE_EQ(logistic(0.0), 0.5);
  EXPECT_NEAR(logistic(2.0), 0.8808, 5e-5);
  EXPECT_NEAR(logistic(-2.0), 0.1192, 5e-5);
  Scorer mock(std::make_shared<backend::MockBackend>());
  EXPECT_NEAR(coherence_paragraph(mock, Knowledge("Cats purr. Cats sleep. Sleep helps.")),
              logistic(2.0), 1e-15);
  EXPECT_NEAR(coherence_paragraph(mock, Knowledge("Cats purr. Rockets launch.")),
              logistic(-2.0), 1e-15);
  EXPECT_NEAR(coherence_paragraph(mock, Knowledge("Alone here.")), logistic(2.0), 1e-15);
}

TEST(Informativeness, ClosedForms) {
  const std::vector<double> certain = {0.0, 0.0, 0.0};
  EXPECT_EQ(informativeness_from_logprobs(certain), 0.0);
  const std::vector<double> halves = {std::log(0.5), std::log(0.5)};
  EXPECT_NEAR(informativeness_from_logprobs(halves), 0.5, 1e-12);
  EXPECT_THROW(informativeness_from_logprobs({}), InvalidArgument);
}

TEST(Informativeness, MockWithUnseenTokens) {
  Scorer mock(std::make_shared<backend::MockBackend>());
  const auto tmpl = selection::load_template("nq-zeroshot-best");
  const auto q = Query::make("q", "who wrote it");
  EXPECT_NEAR(informativeness(mock, q, Knowledge("Billy Hill composed music."), tmpl),
              1.0 - std::exp(-2.0), 1e-12);
}

TEST(Informativeness, ContextIsTheRenderedZeroShotPrompt) {
  std::string seen;
  auto backend = std::make_shared<ScriptedBackend>([&](Endpoint, const json& r) -> json {
    seen = r["context"];
    return conner::testing::logprob_response({-1.0});
  });
  const auto tmpl = selection::load_template("nq-zeroshot-best");
  informativeness(Scorer(backend), Query::make("q", "who wrote it"), Knowledge("x"), tmpl);
  EXPECT_EQ(seen,
            "Generate a Wikipedia to answer the given question.\nQuestion: who wrote it\n"
            "Wikipedia:");
  informativeness(Scorer(backend), Query::make("q", "who wrote it", std::string("Songs")),
                  Knowledge("x"), tmpl);
  EXPECT_EQ(seen.rfind("Topic: Songs\n", 0), 0u);
}

TEST(Informativeness, DecreasingInEachTokenProbability) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, -0.01);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> lp(1 + rng() % 8);
    for (auto& v : lp) v = u(rng);
    const double before = informativeness_from_logprobs(lp);
    lp[rng() % lp.size()] *= 0.5;  // higher probability for one token
    EXPECT_LT(informativeness_from_logprobs(lp), before);
  }
}

}  // namespace
}  // namespace conner::intrinsic
