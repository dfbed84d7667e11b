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

#include "conner/stats/somers.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>

#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/random.hpp"

namespace conner::stats {
namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

void check_shape(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidArgument(
        fmt::format("somers_d: {} metric values vs {} ratings", x.size(), y.size()));
  }
  if (x.size() < 2) throw InvalidArgument("somers_d: need at least two samples");
}

double ratio(const PairCounts& c) {
  if (c.untied_x == 0) {
    throw UndefinedStatistic("somers_d: every metric value is tied");
  }
  return static_cast<double>(c.concordant - c.discordant) /
         static_cast<double>(c.untied_x);
}

// |C - D| for one permutation batch, counted against the observed value.
std::size_t batch_exceedances(std::span<const double> x, std::span<const double> y,
                              std::size_t count, std::uint64_t batch_seed,
                              long long observed) {
  std::vector<double> perm(y.begin(), y.end());
  std::mt19937_64 rng(batch_seed);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < count; ++k) {
    shuffle_in_place(perm, rng);
    const auto c = count_pairs_serial(x, perm);
    if (std::llabs(c.concordant - c.discordant) >= observed) ++hits;
  }
  return hits;
}

long long observed_gap(std::span<const double> x, std::span<const double> y,
                       std::size_t n_perm) {
  check_shape(x, y);
  if (n_perm < kMinPermutations) {
    throw InvalidArgument(fmt::format("permutation_p: n_perm = {} < {}", n_perm,
                                      kMinPermutations));
  }
  const auto c = count_pairs_serial(x, y);
  ratio(c);  // throws when undefined
  // P_X depends on x alone, so comparing |C - D| is comparing |d|.
  return std::llabs(c.concordant - c.discordant);
}

}  // namespace

PairCounts count_pairs(std::span<const double> x, std::span<const double> y) {
  check_shape(x, y);
  const auto n = static_cast<long long>(x.size());
  long long concordant = 0, discordant = 0, untied = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : concordant, discordant, untied)
  for (long long i = 0; i < n; ++i) {
    for (long long j = i + 1; j < n; ++j) {
      const int sx = sign(x[i] - x[j]);
      if (sx == 0) continue;
      ++untied;
      const int prod = sx * sign(y[i] - y[j]);
      concordant += prod > 0;
      discordant += prod < 0;
    }
  }
  return {concordant, discordant, untied};
}

PairCounts count_pairs_serial(std::span<const double> x, std::span<const double> y) {
  check_shape(x, y);
  PairCounts c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int sx = sign(x[i] - x[j]);
      if (sx == 0) continue;
      ++c.untied_x;
      const int prod = sx * sign(y[i] - y[j]);
      if (prod > 0) ++c.concordant;
      if (prod < 0) ++c.discordant;
    }
  }
  return c;
}

double somers_d(std::span<const double> x, std::span<const double> y) {
  return ratio(count_pairs(x, y));
}

double somers_d_serial(std::span<const double> x, std::span<const double> y) {
  return ratio(count_pairs_serial(x, y));
}

PairedSample PairedSample::make(std::vector<double> metric, std::vector<int> human) {
  if (metric.size() != human.size()) {
    throw InvalidArgument(fmt::format("paired sample: {} metric values vs {} ratings",
                                      metric.size(), human.size()));
  }
  if (metric.size() < 2) throw InvalidArgument("paired sample: need >= 2 pairs");
  for (int h : human) {
    if (h < 0 || h > 2) {
      throw InvalidArgument(fmt::format("human rating {} not in {{0, 1, 2}}", h));
    }
  }
  return {std::move(metric), std::move(human)};
}

std::vector<double> PairedSample::human_as_real() const {
  return {human.begin(), human.end()};
}

double somers_d(const PairedSample& s) { return somers_d(s.metric, s.human_as_real()); }

double permutation_p(std::span<const double> x, std::span<const double> y,
                     std::size_t n_perm, std::uint64_t seed) {
  const long long observed = observed_gap(x, y, n_perm);
  const auto batches =
      static_cast<long long>((n_perm + kPermutationBatch - 1) / kPermutationBatch);
  std::size_t hits = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : hits)
  for (long long b = 0; b < batches; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kPermutationBatch;
    const std::size_t count = std::min(kPermutationBatch, n_perm - begin);
    hits += batch_exceedances(x, y, count,
                              derive_seed(seed, static_cast<std::uint64_t>(b)),
                              observed);
  }
  return static_cast<double>(1 + hits) / static_cast<double>(1 + n_perm);
}

double permutation_p_serial(std::span<const double> x, std::span<const double> y,
                            std::size_t n_perm, std::uint64_t seed) {
  const long long observed = observed_gap(x, y, n_perm);
  std::size_t hits = 0;
  for (std::size_t begin = 0, b = 0; begin < n_perm; begin += kPermutationBatch, ++b) {
    const std::size_t count = std::min(kPermutationBatch, n_perm - begin);
    hits += batch_exceedances(x, y, count, derive_seed(seed, std::uint64_t{b}),
                              observed);
  }
  return static_cast<double>(1 + hits) / static_cast<double>(1 + n_perm);
}

CorrelationResult correlate(const PairedSample& s, std::size_t n_perm,
                            std::uint64_t seed) {
  const auto y = s.human_as_real();
  CorrelationResult r;
  r.d = somers_d(s.metric, y);
  r.p_value = permutation_p(s.metric, y, n_perm, seed);
  r.n = s.metric.size();
  r.n_permutations = n_perm;
  return r;
}

}  // namespace conner::stats
