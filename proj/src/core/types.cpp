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

#include "conner/core/types.hpp"

#include <cmath>
#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/text.hpp"

namespace conner {

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::kSpanQa ? "span_qa" : "open_dialogue";
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::kRetrieved: return "retrieved";
    case Provenance::kGenerated: return "generated";
    case Provenance::kReference: return "reference";
  }
  return "generated";
}

std::string_view to_string(AnswerKind kind) {
  return kind == AnswerKind::kSpan ? "span" : "open_ended";
}

std::string_view to_string(FactualityMode mode) {
  switch (mode) {
    case FactualityMode::kMin: return "min";
    case FactualityMode::kMean: return "mean";
    case FactualityMode::kMax: return "max";
  }
  return "min";
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "span_qa") return TaskKind::kSpanQa;
  if (s == "open_dialogue") return TaskKind::kOpenDialogue;
  throw InvalidArgument(fmt::format("unknown task_kind '{}'", s));
}

Provenance parse_provenance(std::string_view s) {
  if (s == "retrieved") return Provenance::kRetrieved;
  if (s == "generated") return Provenance::kGenerated;
  if (s == "reference") return Provenance::kReference;
  throw InvalidArgument(fmt::format("unknown provenance '{}'", s));
}

FactualityMode parse_factuality_mode(std::string_view s) {
  if (s == "min") return FactualityMode::kMin;
  if (s == "mean") return FactualityMode::kMean;
  if (s == "max") return FactualityMode::kMax;
  throw InvalidArgument(fmt::format("unknown factuality mode '{}'", s));
}

Query Query::make(std::string id, std::string text,
                  std::optional<std::string> topic,
                  std::vector<std::string> history, TaskKind kind) {
  if (collapse_whitespace(text).empty()) {
    throw InvalidArgument("query text is empty");
  }
  return Query{std::move(id), std::move(text), std::move(topic),
               std::move(history), kind};
}

Knowledge::Knowledge(std::string text, Provenance provenance,
                     std::optional<std::string> generator_id)
    : text_(std::move(text)),
      sentences_(split_sentences(text_)),
      provenance_(provenance),
      generator_id_(std::move(generator_id)) {}

Answer Answer::make(std::string text, AnswerKind kind) {
  if (collapse_whitespace(text).empty()) {
    throw InvalidArgument("answer text is empty");
  }
  return Answer{std::move(text), kind};
}

NliVector::NliVector(double entail, double neutral, double contradict)
    : entail_(entail), neutral_(neutral), contradict_(contradict) {
  for (double v : {entail, neutral, contradict}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument(fmt::format(
          "NLI component out of [0,1]: ({}, {}, {})", entail, neutral,
          contradict));
    }
  }
  if (std::abs(entail + neutral + contradict - 1.0) > kSimplexTolerance) {
    throw InvalidArgument(fmt::format("NLI vector off the simplex: ({}, {}, {})",
                                      entail, neutral, contradict));
  }
}

namespace {

void check_range(const char* name, const std::optional<double>& v, double lo,
                 double hi) {
  if (v && !(*v >= lo && *v <= hi)) {
    throw InvalidArgument(
        fmt::format("score '{}' = {} outside [{}, {}]", name, *v, lo, hi));
  }
}

}  // namespace

void ScoreCard::validate() const {
  // NliVector already guarantees the factuality simplex. The open ends of
  // coh_sent (0,1] and info [0,1) can be reached by double rounding on
  // extreme log-probabilities, so the checks here are closed.
  check_range("rel", rel, 0.0, 1.0);
  check_range("coh_sent", coh_sent, 0.0, 1.0);
  check_range("coh_para", coh_para, 0.0, 1.0);
  check_range("info", info, 0.0, 1.0);
  check_range("help", help, 0.0, 1.0);
  check_range("validity", validity, 0.0, 1.0);
}

}  // namespace conner
