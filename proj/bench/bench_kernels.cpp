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

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "conner/stats/somers.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double best_ms(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

struct Sample {
  std::vector<double> x, y;
};

Sample make_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sample s{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    s.x[i] = u(rng);
    s.y[i] = static_cast<double>(rng() % 3);
  }
  return s;
}

}  // namespace

int main() {
  using namespace conner::stats;
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-16s %8s %12s %12s %8s %s\n", "kernel", "n", "serial ms", "openmp ms",
              "speedup", "agree");

  for (std::size_t n : {1000u, 4000u, 16000u}) {
    const auto s = make_sample(n, n);
    PairCounts a, b;
    const double ts = best_ms(3, [&] { a = count_pairs_serial(s.x, s.y); });
    const double tp = best_ms(3, [&] { b = count_pairs(s.x, s.y); });
    std::printf("%-16s %8zu %12.3f %12.3f %8.2f %s\n", "count_pairs", n, ts, tp, ts / tp,
                a == b ? "yes" : "NO");
  }

  for (std::size_t n : {50u, 200u, 400u}) {
    const auto s = make_sample(n, 7 * n);
    constexpr std::size_t kPerm = 2000;
    double a = 0, b = 0;
    const double ts = best_ms(2, [&] { a = permutation_p_serial(s.x, s.y, kPerm, 11); });
    const double tp = best_ms(2, [&] { b = permutation_p(s.x, s.y, kPerm, 11); });
    std::printf("%-16s %8zu %12.3f %12.3f %8.2f %s\n", "permutation_p", n, ts, tp, ts / tp,
                a == b ? "yes" : "NO");
  }
  return 0;
}
