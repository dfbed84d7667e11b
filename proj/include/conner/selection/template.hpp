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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conner::selection {

// Plain-text prompt pattern with {topic}, {query}, {utterance}, {knowledge},
// {answer} and {response} placeholders. Lines are separated by '\n'.
struct PromptTemplate {
  std::string name;
  std::string pattern;
  std::string separator = "\n";  // between rendered examples

  std::vector<std::string> placeholders() const;
  bool has(std::string_view placeholder) const;
};

using TemplateValues = std::map<std::string, std::string, std::less<>>;

// Fills every placeholder. A line mentioning {topic} is dropped when no topic
// is supplied; any other unsupplied placeholder is an InvalidArgument naming
// it.
//
// With `open_slot`, rendering stops at that placeholder: the line keeps its
// label with trailing blanks removed and everything after it is discarded.
// This is the form used for the block the model has to continue.
std::string render(const PromptTemplate& tmpl, const TemplateValues& values,
                   std::optional<std::string_view> open_slot = std::nullopt);

// Templates shipped with the engine, keyed by name.
const std::map<std::string, PromptTemplate, std::less<>>& builtin_templates();

// <dir>/<name>.txt when present, otherwise the built-in of that name.
PromptTemplate load_template(std::string_view name,
                             const std::optional<std::filesystem::path>& dir =
                                 std::nullopt);

}  // namespace conner::selection
