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

#include "conner/stats/baseline.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "conner/core/error.hpp"
#include "conner/core/text.hpp"

namespace conner::stats {

std::string normalize_answer(std::string_view text) {
  std::string stripped;
  stripped.reserve(text.size());
  for (char c : to_lower(text)) {
    if (!std::ispunct(static_cast<unsigned char>(c))) stripped.push_back(c);
  }
  std::string out;
  for (const auto& token : split_whitespace(stripped)) {
    if (token == "a" || token == "an" || token == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

int exact_match(std::string_view pred, std::span<const std::string> golds) {
  if (golds.empty()) throw InvalidArgument("exact_match: no gold answers");
  const std::string p = normalize_answer(pred);
  return std::any_of(golds.begin(), golds.end(),
                     [&](const std::string& g) { return normalize_answer(g) == p; })
             ? 1
             : 0;
}

double unigram_f1(std::string_view pred, std::string_view gold) {
  const auto p = split_whitespace(normalize_answer(pred));
  const auto g = split_whitespace(normalize_answer(gold));
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : g) ++counts[t];
  std::size_t overlap = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  // 2PR / (P + R) reduces to 2 overlap / (|pred| + |gold|), which is exactly
  // symmetric in floating point.
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(p.size() + g.size());
}

}  // namespace conner::stats
