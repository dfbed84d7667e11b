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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conner {

enum class TaskKind { kSpanQa, kOpenDialogue };
enum class Provenance { kRetrieved, kGenerated, kReference };
enum class AnswerKind { kSpan, kOpenEnded };
enum class FactualityMode { kMin, kMean, kMax };

std::string_view to_string(TaskKind kind);
std::string_view to_string(Provenance provenance);
std::string_view to_string(AnswerKind kind);
std::string_view to_string(FactualityMode mode);

TaskKind parse_task_kind(std::string_view s);
Provenance parse_provenance(std::string_view s);
FactualityMode parse_factuality_mode(std::string_view s);

struct Query {
  std::string id;
  // For dialogue, the last utterance of the partner.
  std::string text;
  std::optional<std::string> topic;
  std::vector<std::string> history;
  TaskKind task_kind = TaskKind::kSpanQa;

  // Throws InvalidArgument when text is blank.
  static Query make(std::string id, std::string text,
                    std::optional<std::string> topic = std::nullopt,
                    std::vector<std::string> history = {},
                    TaskKind kind = TaskKind::kSpanQa);
};

struct Sentence {
  std::size_t index = 0;
  std::string text;

  bool operator==(const Sentence&) const = default;
};

// Knowledge text together with its sentence segmentation. The sentence list
// is always split_sentences(text); there is no way to construct one that
// disagrees.
class Knowledge {
 public:
  explicit Knowledge(std::string text,
                     Provenance provenance = Provenance::kGenerated,
                     std::optional<std::string> generator_id = std::nullopt);

  const std::string& text() const noexcept { return text_; }
  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
  Provenance provenance() const noexcept { return provenance_; }
  const std::optional<std::string>& generator_id() const noexcept {
    return generator_id_;
  }

 private:
  std::string text_;
  std::vector<Sentence> sentences_;
  Provenance provenance_;
  std::optional<std::string> generator_id_;
};

struct Evidence {
  std::string text;
  std::string source_id;
  double retrieval_score = 0.0;
};

struct Answer {
  std::string text;
  AnswerKind kind = AnswerKind::kSpan;

  static Answer make(std::string text, AnswerKind kind);
};

// Probability triple (entail, neutral, contradict). Construction checks the
// simplex constraint.
class NliVector {
 public:
  static constexpr double kSimplexTolerance = 1e-6;

  NliVector(double entail, double neutral, double contradict);

  static NliVector non_verified() { return {0.0, 1.0, 0.0}; }

  double entail() const noexcept { return entail_; }
  double neutral() const noexcept { return neutral_; }
  double contradict() const noexcept { return contradict_; }

  bool operator==(const NliVector&) const = default;

 private:
  double entail_;
  double neutral_;
  double contradict_;
};

struct FactualityScore {
  NliVector vector;
  FactualityMode mode = FactualityMode::kMin;

  double fact_consistent() const noexcept { return vector.entail(); }
  double non_verified() const noexcept { return vector.neutral(); }
  double fact_inconsistent() const noexcept { return vector.contradict(); }
};

// Per-item scores. Metrics outside the run's selector stay empty.
struct ScoreCard {
  std::optional<FactualityScore> fact;
  std::optional<double> rel;
  std::optional<double> coh_sent;
  std::optional<double> coh_para;
  std::optional<double> info;
  std::optional<double> help;
  std::optional<double> validity;

  // Throws InvalidArgument naming the first field outside its range.
  void validate() const;
};

struct EvalItem {
  Query query;
  Knowledge knowledge;
  std::optional<Answer> answer;
  std::vector<Answer> reference_answers;
  std::optional<std::string> reference_knowledge;
  std::map<std::string, int> human_ratings;
};

}  // namespace conner
