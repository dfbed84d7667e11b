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

#include "conner/selection/template.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "conner/core/error.hpp"

namespace conner::selection {
namespace {

struct Token {
  bool placeholder;
  std::string text;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto open = line.find('{', pos);
    const auto close =
        open == std::string_view::npos ? open : line.find('}', open + 1);
    if (open == std::string_view::npos || close == std::string_view::npos) {
      out.push_back({false, std::string(line.substr(pos))});
      break;
    }
    if (open > pos) out.push_back({false, std::string(line.substr(pos, open - pos))});
    out.push_back({true, std::string(line.substr(open + 1, close - open - 1))});
    pos = close + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (true) {
    const auto nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  for (const auto& t : tokenize(pattern)) {
    if (t.placeholder) out.push_back(t.text);
  }
  return out;
}

bool PromptTemplate::has(std::string_view placeholder) const {
  for (const auto& p : placeholders()) {
    if (p == placeholder) return true;
  }
  return false;
}

std::string render(const PromptTemplate& tmpl, const TemplateValues& values,
                   std::optional<std::string_view> open_slot) {
  if (open_slot && !tmpl.has(*open_slot)) {
    throw InvalidArgument(fmt::format("template '{}' has no {{{}}} slot", tmpl.name,
                                      *open_slot));
  }
  std::vector<std::string> rendered;
  for (std::string_view line : lines_of(tmpl.pattern)) {
    const auto tokens = tokenize(line);
    bool drop = false;
    bool stop = false;
    std::string out;
    for (const auto& t : tokens) {
      if (!t.placeholder) {
        out += t.text;
        continue;
      }
      if (open_slot && t.text == *open_slot) {
        stop = true;
        break;
      }
      const auto it = values.find(t.text);
      if (it != values.end()) {
        out += it->second;
      } else if (t.text == "topic") {
        drop = true;
      } else {
        throw InvalidArgument(fmt::format(
            "template '{}': no value for placeholder {{{}}}", tmpl.name, t.text));
      }
    }
    if (stop) {
      rendered.push_back(rstrip(std::move(out)));
      break;
    }
    if (!drop) rendered.push_back(std::move(out));
  }
  std::string joined;
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    if (i) joined += '\n';
    joined += rendered[i];
  }
  return joined;
}

const std::map<std::string, PromptTemplate, std::less<>>& builtin_templates() {
  static const auto* templates = [] {
    auto* m = new std::map<std::string, PromptTemplate, std::less<>>;
    auto add = [m](std::string name, std::string pattern) {
      (*m)[name] = PromptTemplate{name, std::move(pattern), "\n"};
    };
    // Zero-shot knowledge generation.
    add("nq-zeroshot-best",
        "Topic: {topic}\nGenerate a Wikipedia to answer the given question.\n"
        "Question: {query}\nWikipedia:");
    add("wow-zeroshot-best",
        "Topic: {topic}\nGenerate a Wikipedia to answer the given question.\n"
        "Question: {utterance}\nWikipedia:");
    // Few-shot knowledge generation.
    add("nq-fewshot-best",
        "Topic: {topic}\nQuery: {query}\nRelated Wikipedia knowledge: {knowledge}");
    add("wow-fewshot-best",
        "Topic: {topic}\nQuery: {utterance}\nRelated Wikipedia knowledge: {knowledge}");
    // Answer generation.
    add("nq-answer-best",
        "Topic: {topic}\nPassage: {knowledge}\nQuery: {query}\nAnswer: {answer}");
    add("wow-answer-best",
        "Topic: {topic}\nPassage: {knowledge}\nSpeaker 1: {utterance}\n"
        "Speaker 2: {response}");
    return m;
  }();
  return *templates;
}

PromptTemplate load_template(std::string_view name,
                             const std::optional<std::filesystem::path>& dir) {
  if (dir) {
    const auto path = *dir / (std::string(name) + ".txt");
    if (std::filesystem::exists(path)) {
      std::ifstream in(path);
      std::stringstream ss;
      ss << in.rdbuf();
      std::string pattern = ss.str();
      if (!pattern.empty() && pattern.back() == '\n') pattern.pop_back();
      return PromptTemplate{std::string(name), std::move(pattern), "\n"};
    }
  }
  const auto& builtins = builtin_templates();
  const auto it = builtins.find(name);
  if (it == builtins.end()) {
    throw InvalidArgument(fmt::format("unknown template '{}'", name));
  }
  return it->second;
}

}  // namespace conner::selection
