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

#include <string>
#include <string_view>
#include <vector>

#include "conner/core/types.hpp"

namespace conner {

// Collapses whitespace runs to one space and trims both ends.
std::string collapse_whitespace(std::string_view text);

// Rule-based segmentation: a boundary follows '.', '!' or '?' (plus any
// closing quotes/brackets) when the next character after the whitespace is an
// uppercase letter or a digit, unless the word ending there is a known
// abbreviation. Input is whitespace-collapsed first.
std::vector<Sentence> split_sentences(std::string_view text);

std::string to_lower(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

// Lowercased alphanumeric words minus the fixed stopword list, deduplicated
// and sorted.
std::vector<std::string> content_words(std::string_view text);

bool is_stopword(std::string_view word);

// Jaccard similarity of the content-word sets. Two empty sets score 1.
double content_jaccard(std::string_view a, std::string_view b);

}  // namespace conner
