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
#include <string>
#include <string_view>

// Reference-based answer metrics, kept for comparison with validity.
namespace conner::stats {

// Lowercase, strip ASCII punctuation, drop the articles a/an/the, collapse
// whitespace.
std::string normalize_answer(std::string_view text);

// 1 when the normalized prediction equals any normalized gold answer.
int exact_match(std::string_view pred, std::span<const std::string> golds);

// Token-multiset F1 over normalized unigrams. Both empty scores 1, exactly
// one empty scores 0.
double unigram_f1(std::string_view pred, std::string_view gold);

}  // namespace conner::stats
