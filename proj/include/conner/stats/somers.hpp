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

// Somers' D of a human ordinal rating given a metric score, and a seeded
// permutation test for it.
//
// The OpenMP kernels are the production path. The *_serial variants are the
// single-threaded reference they are tested against, and must agree exactly.
namespace conner::stats {

struct PairCounts {
  long long concordant = 0;
  long long discordant = 0;
  long long untied_x = 0;  // pairs with x_i != x_j

  bool operator==(const PairCounts&) const = default;
};

PairCounts count_pairs(std::span<const double> x, std::span<const double> y);
PairCounts count_pairs_serial(std::span<const double> x, std::span<const double> y);

// (C - D) / P_X with x as the predictor. Throws InvalidArgument for fewer
// than two points or mismatched lengths, UndefinedStatistic when every x is
// tied.
double somers_d(std::span<const double> x, std::span<const double> y);
double somers_d_serial(std::span<const double> x, std::span<const double> y);

// Metric scores paired with human ratings in {0, 1, 2}.
struct PairedSample {
  std::vector<double> metric;
  std::vector<int> human;

  static PairedSample make(std::vector<double> metric, std::vector<int> human);
  std::vector<double> human_as_real() const;
};

double somers_d(const PairedSample& s);

inline constexpr std::size_t kMinPermutations = 100;
inline constexpr std::size_t kDefaultPermutations = 10000;
inline constexpr std::size_t kPermutationBatch = 64;

// Two-sided p = (1 + #{|d_perm| >= |d_obs|}) / (1 + n_perm) over random
// permutations of y. Permutations are drawn in batches of kPermutationBatch,
// batch b seeded from derive_seed(seed, b), so the value is independent of
// the thread count.
double permutation_p(std::span<const double> x, std::span<const double> y,
                     std::size_t n_perm, std::uint64_t seed);
double permutation_p_serial(std::span<const double> x, std::span<const double> y,
                            std::size_t n_perm, std::uint64_t seed);

struct CorrelationResult {
  double d = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t n_permutations = 0;
};

CorrelationResult correlate(const PairedSample& s, std::size_t n_perm,
                            std::uint64_t seed);

}  // namespace conner::stats
