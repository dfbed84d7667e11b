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

#include "conner/core/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace conner {
namespace {

constexpr std::array<std::string_view, 9> kAbbreviations = {
    "Mr.", "Mrs.", "Dr.", "St.", "e.g.", "i.e.", "etc.", "U.S.", "No."};

// Function words only. Wh-words and negations carry meaning for matching and
// stay in.
constexpr std::array<std::string_view, 44> kStopwords = {
    "a",    "am",   "an",   "and",  "are",  "as",    "at",   "be",   "been",
    "being", "but", "by",   "did",  "do",   "does",  "for",  "from", "had",
    "has",  "have", "in",   "into", "is",   "it",    "its",  "nor",  "of",
    "on",   "or",   "s",    "so",   "than", "that",  "the",  "then", "these",
    "this", "those", "to",  "was",  "were", "will",  "with", "would"};

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool is_opener(char c) { return c == '"' || c == '\'' || c == '('; }

bool starts_sentence(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isupper(u) != 0 || std::isdigit(u) != 0;
}

bool word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

// Word ending at `end` (inclusive), without leading openers.
std::string_view word_ending_at(std::string_view s, std::size_t end) {
  std::size_t begin = s.rfind(' ', end);
  begin = begin == std::string_view::npos ? 0 : begin + 1;
  while (begin < end && is_opener(s[begin])) ++begin;
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<Sentence> split_sentences(std::string_view text) {
  const std::string s = collapse_whitespace(text);
  std::vector<Sentence> out;
  std::size_t start = 0;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_terminal(s[i])) continue;
    std::size_t j = i + 1;
    while (j < n && is_closer(s[j])) ++j;
    if (j + 1 >= n || s[j] != ' ') continue;
    std::size_t next = j + 1;
    if (is_opener(s[next]) && next + 1 < n) ++next;
    if (!starts_sentence(s[next])) continue;
    if (s[i] == '.') {
      const auto word = word_ending_at(s, i);
      if (std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
          kAbbreviations.end()) {
        continue;
      }
    }
    out.push_back({out.size(), s.substr(start, j - start)});
    start = j + 1;
    i = j;
  }
  if (start < n) out.push_back({out.size(), s.substr(start)});
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  });
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_stopword(std::string_view word) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

std::vector<std::string> content_words(std::string_view text) {
  const std::string lower = to_lower(text);
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < lower.size()) {
    while (i < lower.size() && !word_char(lower[i])) ++i;
    std::size_t j = i;
    while (j < lower.size() && word_char(lower[j])) ++j;
    if (j > i) {
      std::string w = lower.substr(i, j - i);
      if (!is_stopword(w)) words.push_back(std::move(w));
    }
    i = j;
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

double content_jaccard(std::string_view a, std::string_view b) {
  const auto wa = content_words(a);
  const auto wb = content_words(b);
  if (wa.empty() && wb.empty()) return 1.0;
  std::vector<std::string> common;
  std::set_intersection(wa.begin(), wa.end(), wb.begin(), wb.end(),
                        std::back_inserter(common));
  const std::size_t uni = wa.size() + wb.size() - common.size();
  return static_cast<double>(common.size()) / static_cast<double>(uni);
}

}  // namespace conner
