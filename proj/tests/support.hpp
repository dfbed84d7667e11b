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

#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "conner/backend/backend.hpp"
#include "conner/backend/protocol.hpp"
#include "conner/core/error.hpp"
#include "conner/core/types.hpp"

namespace conner::testing {

using backend::Endpoint;
using backend::json;

// Backend whose answers come from a test-supplied function.
class ScriptedBackend final : public backend::Backend {
 public:
  using Handler = std::function<json(Endpoint, const json&)>;

  explicit ScriptedBackend(Handler handler, std::string id = "scripted")
      : handler_(std::move(handler)), id_(std::move(id)) {}

  const std::string& id() const override { return id_; }
  json call(Endpoint endpoint, const json& request) override {
    ++calls_;
    backend::validate_request(endpoint, request);
    return handler_(endpoint, request);
  }
  backend::Health health() override {
    return {id_, backend::kProtocolVersion, {"nli", "rank", "logprob", "retrieve", "discourse"}};
  }
  std::size_t calls() const { return calls_.load(); }

 private:
  Handler handler_;
  std::string id_;
  std::atomic<std::size_t> calls_{0};
};

inline json logprob_response(const std::vector<double>& logprobs) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < logprobs.size(); ++i) tokens.push_back("t" + std::to_string(i));
  return {{"tokens", tokens}, {"logprobs", logprobs}};
}

inline NliVector random_simplex(std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  const double a = ex(rng), b = ex(rng), c = ex(rng);
  const double s = a + b + c;
  const double e = a / s, n = b / s;
  return NliVector(e, n, std::max(0.0, 1.0 - e - n));
}

// Exhaustive factuality reference: walks every choice of one evidence per
// sentence in lexicographic order and keeps the first tuple that no later
// tuple improves on any sentence without losing on another.
inline NliVector factuality_oracle(const std::vector<std::vector<NliVector>>& grid,
                                   FactualityMode mode) {
  const std::size_t m = grid.size();
  std::vector<NliVector> chosen(m, NliVector::non_verified());
  std::vector<std::size_t> sigma(m, 0), best;
  bool have_best = false;
  for (;;) {
    if (!have_best) {
      best = sigma;
      have_best = true;
    } else {
      bool all_ge = true, some_gt = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (grid[i].empty()) continue;
        const double a = grid[i][sigma[i]].entail(), b = grid[i][best[i]].entail();
        if (a < b) all_ge = false;
        if (a > b) some_gt = true;
      }
      if (all_ge && some_gt) best = sigma;
    }
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      const std::size_t width = grid[pos].empty() ? 1 : grid[pos].size();
      if (++sigma[pos] < width) break;
      sigma[pos] = 0;
      if (pos == 0) {
        pos = m + 1;
        break;
      }
    }
    if (pos == m + 1 || m == 0) break;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!grid[i].empty()) chosen[i] = grid[i][best[i]];
  }
  if (mode == FactualityMode::kMean) {
    double e = 0, n = 0, c = 0;
    for (const auto& v : chosen) {
      e += v.entail();
      n += v.neutral();
      c += v.contradict();
    }
    return NliVector(e / m, n / m, c / m);
  }
  std::size_t pick = 0;
  for (std::size_t i = 1; i < m; ++i) {
    const double a = chosen[i].entail(), b = chosen[pick].entail();
    if (mode == FactualityMode::kMin ? a < b : a > b) pick = i;
  }
  return chosen[pick];
}

inline std::vector<std::vector<NliVector>> random_grid(std::mt19937_64& rng,
                                                       std::size_t max_m = 5,
                                                       std::size_t max_l = 5) {
  std::uniform_int_distribution<std::size_t> md(1, max_m), ld(0, max_l);
  std::vector<std::vector<NliVector>> grid(md(rng));
  for (auto& row : grid) {
    const std::size_t l = ld(rng);
    for (std::size_t j = 0; j < l; ++j) {
      NliVector v = random_simplex(rng);
      // Occasional exact ties exercise the lowest-index rule.
      if (j > 0 && rng() % 5 == 0) v = row[rng() % j];
      row.push_back(v);
    }
  }
  return grid;
}

struct BruteCounts {
  long long concordant = 0, discordant = 0, untied_x = 0;
};

inline BruteCounts brute_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  BruteCounts c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0) ++c.concordant;
      if (s < 0) ++c.discordant;
      if (x[i] != x[j]) ++c.untied_x;
    }
  }
  return c;
}

inline double brute_somers(const std::vector<double>& x, const std::vector<double>& y) {
  const auto c = brute_pairs(x, y);
  return static_cast<double>(c.concordant - c.discordant) / static_cast<double>(c.untied_x);
}

}  // namespace conner::testing
