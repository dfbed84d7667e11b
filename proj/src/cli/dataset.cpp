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

#include "conner/cli/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/text.hpp"

namespace conner::cli {
namespace {

using nlohmann::json;

const json* optional_field(const json& obj, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string string_field(const json& obj, const char* name, std::size_t line,
                         bool required, bool non_empty = true) {
  const json* v = optional_field(obj, name);
  if (!v) {
    if (required) throw SchemaError(line, fmt::format("missing field '{}'", name));
    return {};
  }
  if (!v->is_string()) {
    throw SchemaError(line, fmt::format("field '{}' must be a string", name));
  }
  std::string s = v->get<std::string>();
  if (non_empty && collapse_whitespace(s).empty()) {
    throw SchemaError(line, fmt::format("field '{}' is empty", name));
  }
  return s;
}

std::vector<std::string> string_list(const json& obj, const char* name,
                                     std::size_t line) {
  const json* v = optional_field(obj, name);
  if (!v) return {};
  if (!v->is_array()) {
    throw SchemaError(line, fmt::format("field '{}' must be an array", name));
  }
  std::vector<std::string> out;
  for (const auto& s : *v) {
    if (!s.is_string()) {
      throw SchemaError(line, fmt::format("field '{}' must hold strings", name));
    }
    out.push_back(s.get<std::string>());
  }
  return out;
}

template <typename Fn>
auto schema_guard(std::size_t line, const char* field, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw SchemaError(line, fmt::format("field '{}': {}", field, e.what()));
  }
}

}  // namespace

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "nq_jsonl") return DatasetFormat::kNqJsonl;
  if (name == "wow_jsonl") return DatasetFormat::kWowJsonl;
  throw ConfigError(fmt::format("unknown dataset format '{}'", name));
}

std::string_view to_string(DatasetFormat format) {
  return format == DatasetFormat::kNqJsonl ? "nq_jsonl" : "wow_jsonl";
}

std::map<std::string, int> parse_ratings(const json& ratings, std::size_t line) {
  if (!ratings.is_object()) {
    throw SchemaError(line, "field 'human_ratings' must be an object");
  }
  std::map<std::string, int> out;
  for (const auto& [name, value] : ratings.items()) {
    if (std::find(std::begin(kRatingNames), std::end(kRatingNames), name) ==
        std::end(kRatingNames)) {
      throw SchemaError(line, fmt::format("unknown human rating '{}'", name));
    }
    if (!value.is_number_integer() || value.get<long long>() < 0 ||
        value.get<long long>() > 2) {
      throw SchemaError(line, fmt::format("human rating '{}' = {} not in {{0, 1, 2}}",
                                          name, value.dump()));
    }
    out[name] = value.get<int>();
  }
  return out;
}

EvalItem parse_record(const json& record, DatasetFormat format, std::size_t line) {
  if (!record.is_object()) throw SchemaError(line, "record is not a JSON object");
  const TaskKind kind = format == DatasetFormat::kNqJsonl ? TaskKind::kSpanQa
                                                          : TaskKind::kOpenDialogue;
  const AnswerKind answer_kind =
      kind == TaskKind::kSpanQa ? AnswerKind::kSpan : AnswerKind::kOpenEnded;

  std::string id = string_field(record, "id", line, true);
  std::string text = string_field(record, "query", line, true);
  std::optional<std::string> topic;
  if (optional_field(record, "topic")) topic = string_field(record, "topic", line, true);
  auto history = string_list(record, "history", line);
  if (optional_field(record, "task_kind")) {
    const auto declared = string_field(record, "task_kind", line, true);
    const auto parsed =
        schema_guard(line, "task_kind", [&] { return parse_task_kind(declared); });
    if (parsed != kind) {
      throw SchemaError(line, fmt::format("task_kind '{}' does not match format {}",
                                          declared, to_string(format)));
    }
  }

  const json* k = optional_field(record, "knowledge");
  if (!k) throw SchemaError(line, "missing field 'knowledge'");
  if (!k->is_object()) throw SchemaError(line, "field 'knowledge' must be an object");
  std::string k_text = string_field(*k, "text", line, true);
  const auto provenance = schema_guard(line, "knowledge.provenance", [&] {
    return parse_provenance(string_field(*k, "provenance", line, true));
  });
  std::optional<std::string> generator;
  if (optional_field(*k, "generator_id")) {
    generator = string_field(*k, "generator_id", line, true);
  }

  EvalItem item{Query{std::move(id), std::move(text), std::move(topic),
                      std::move(history), kind},
                Knowledge(std::move(k_text), provenance, std::move(generator)),
                std::nullopt,
                {},
                std::nullopt,
                {}};
  if (optional_field(record, "answer")) {
    item.answer = Answer{string_field(record, "answer", line, true), answer_kind};
  }
  for (auto& ref : string_list(record, "reference_answers", line)) {
    if (collapse_whitespace(ref).empty()) {
      throw SchemaError(line, "field 'reference_answers' holds an empty answer");
    }
    item.reference_answers.push_back(Answer{std::move(ref), answer_kind});
  }
  if (optional_field(record, "reference_knowledge")) {
    item.reference_knowledge = string_field(record, "reference_knowledge", line, false,
                                            false);
  }
  if (const json* r = optional_field(record, "human_ratings")) {
    item.human_ratings = parse_ratings(*r, line);
  }
  return item;
}

std::vector<EvalItem> parse_dataset(std::istream& in, DatasetFormat format) {
  std::vector<EvalItem> items;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (collapse_whitespace(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(lineno, fmt::format("malformed JSON: {}", e.what()));
    }
    EvalItem item = parse_record(record, format, lineno);
    if (!ids.insert(item.query.id).second) {
      throw SchemaError(lineno, fmt::format("duplicate id '{}'", item.query.id));
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<EvalItem> parse_dataset(const std::filesystem::path& path,
                                    DatasetFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw SchemaError(0, fmt::format("cannot read dataset '{}'", path.string()));
  }
  return parse_dataset(in, format);
}

std::map<std::string, std::map<std::string, int>> parse_annotations(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw SchemaError(0, fmt::format("cannot read annotations '{}'", path.string()));
  }
  std::map<std::string, std::map<std::string, int>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (collapse_whitespace(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(lineno, fmt::format("malformed JSON: {}", e.what()));
    }
    if (!record.is_object()) throw SchemaError(lineno, "record is not a JSON object");
    std::string id = string_field(record, "id", lineno, true);
    const json* r = optional_field(record, "human_ratings");
    if (!r) throw SchemaError(lineno, "missing field 'human_ratings'");
    if (!out.emplace(id, parse_ratings(*r, lineno)).second) {
      throw SchemaError(lineno, fmt::format("duplicate id '{}'", id));
    }
  }
  return out;
}

}  // namespace conner::cli
