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

#include <atomic>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conner/backend/backend.hpp"

namespace conner::backend {

struct Passage {
  std::string source_id;
  std::string text;
};

// Corpus file: one {"source_id": s, "text": s} object per line.
std::vector<Passage> load_corpus(const std::filesystem::path& path);

// Closed-form stand-ins for the five model endpoints. J below is the
// content-word Jaccard similarity (see content_jaccard).
namespace mock {

// entail = J, contradict = 0.1 (1 - J), neutral = the rest.
NliVector nli(std::string_view premise, std::string_view hypothesis);

// J(query, passage).
double rank(std::string_view query, std::string_view passage);

// Whitespace tokens of the continuation; -1 for a token that also appears as
// a whitespace token of the context, -2 otherwise.
TokenLogprobs logprob(std::string_view context, std::string_view continuation);

// Corpus ranked by J(query, passage) descending, ties by source_id
// ascending, truncated to l.
std::vector<Evidence> retrieve(std::span<const Passage> corpus,
                               std::string_view query, std::size_t l);

// 4 f - 2 where f is the fraction of adjacent sentence pairs sharing a
// content word; a single sentence scores +2.
double discourse(std::span<const std::string> sentences);

}  // namespace mock

class MockBackend final : public Backend {
 public:
  explicit MockBackend(std::vector<Passage> corpus = {},
                       std::string backend_id = "mock");

  const std::string& id() const override { return id_; }
  json call(Endpoint endpoint, const json& request) override;
  Health health() override;

  std::size_t call_count() const noexcept { return calls_.load(); }

 private:
  std::vector<Passage> corpus_;
  std::string id_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace conner::backend
