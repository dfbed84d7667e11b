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

#include "conner/backend/scorer.hpp"

#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/text.hpp"

namespace conner::backend {
namespace {

std::size_t slot(Endpoint e) { return static_cast<std::size_t>(e); }

void require_text(std::string_view value, const char* what) {
  if (collapse_whitespace(value).empty()) {
    throw InvalidArgument(fmt::format("{} must be non-empty", what));
  }
}

}  // namespace

Scorer::Scorer(BackendPtr all) {
  if (!all) throw InvalidArgument("Scorer needs a backend");
  routing_.fill(all);
}

Scorer::Scorer(Routing routing) : routing_(std::move(routing)) {}

const BackendPtr& Scorer::backend(Endpoint endpoint) const {
  const auto& b = routing_[slot(endpoint)];
  if (!b) {
    throw ConfigError(fmt::format("no backend configured for endpoint '{}'",
                                  to_string(endpoint)));
  }
  return b;
}

bool Scorer::has(Endpoint endpoint) const {
  return routing_[slot(endpoint)] != nullptr;
}

NliVector Scorer::nli(std::string_view premise, std::string_view hypothesis) const {
  require_text(premise, "nli premise");
  require_text(hypothesis, "nli hypothesis");
  return decode_nli(
      backend(Endpoint::kNli)->call(Endpoint::kNli, nli_request(premise, hypothesis)));
}

std::vector<NliVector> Scorer::nli_batch(
    std::span<const std::pair<std::string, std::string>> pairs) const {
  std::vector<json> requests;
  requests.reserve(pairs.size());
  for (const auto& [premise, hypothesis] : pairs) {
    require_text(premise, "nli premise");
    require_text(hypothesis, "nli hypothesis");
    requests.push_back(nli_request(premise, hypothesis));
  }
  const auto responses = backend(Endpoint::kNli)->call_batch(Endpoint::kNli, requests);
  if (responses.size() != requests.size()) {
    throw ProtocolError("nli batch response is not index-aligned");
  }
  std::vector<NliVector> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(decode_nli(r));
  return out;
}

double Scorer::rank(std::string_view query, std::string_view passage) const {
  require_text(query, "rank query");
  require_text(passage, "rank passage");
  return decode_rank(
      backend(Endpoint::kRank)->call(Endpoint::kRank, rank_request(query, passage)));
}

TokenLogprobs Scorer::token_logprobs(std::string_view context,
                                     std::string_view continuation) const {
  require_text(continuation, "logprob continuation");
  return decode_logprob(backend(Endpoint::kLogprob)
                            ->call(Endpoint::kLogprob,
                                   logprob_request(context, continuation)));
}

std::vector<Evidence> Scorer::retrieve(std::string_view query, std::size_t l) const {
  if (l < 1) throw InvalidArgument("retrieve: l must be >= 1");
  return decode_retrieve(
      backend(Endpoint::kRetrieve)->call(Endpoint::kRetrieve, retrieve_request(query, l)),
      l);
}

double Scorer::discourse_raw(std::span<const std::string> sentences) const {
  if (sentences.empty()) throw InvalidArgument("discourse: need >= 1 sentence");
  return decode_discourse(backend(Endpoint::kDiscourse)
                              ->call(Endpoint::kDiscourse, discourse_request(sentences)));
}

}  // namespace conner::backend
