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

#include "conner/backend/mock.hpp"

#include <algorithm>
#include <fstream>
#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/text.hpp"

namespace conner::backend {

std::vector<Passage> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument(fmt::format("cannot open corpus '{}'", path.string()));
  }
  std::vector<Passage> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (collapse_whitespace(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(lineno, fmt::format("corpus: {}", e.what()));
    }
    if (!j.is_object() || !j.contains("source_id") || !j["source_id"].is_string() ||
        !j.contains("text") || !j["text"].is_string() ||
        j["text"].get_ref<const std::string&>().empty()) {
      throw SchemaError(lineno, "corpus: need string fields 'source_id' and 'text'");
    }
    corpus.push_back({j["source_id"].get<std::string>(), j["text"].get<std::string>()});
  }
  return corpus;
}

namespace mock {

NliVector nli(std::string_view premise, std::string_view hypothesis) {
  const double j = content_jaccard(premise, hypothesis);
  const double contradict = 0.1 * (1.0 - j);
  const double neutral = std::max(0.0, 1.0 - j - contradict);
  return NliVector(j, neutral, contradict);
}

double rank(std::string_view query, std::string_view passage) {
  return content_jaccard(query, passage);
}

TokenLogprobs logprob(std::string_view context, std::string_view continuation) {
  auto ctx = split_whitespace(context);
  std::sort(ctx.begin(), ctx.end());
  TokenLogprobs out;
  out.tokens = split_whitespace(continuation);
  out.logprobs.reserve(out.tokens.size());
  for (const auto& t : out.tokens) {
    out.logprobs.push_back(std::binary_search(ctx.begin(), ctx.end(), t) ? -1.0
                                                                         : -2.0);
  }
  return out;
}

std::vector<Evidence> retrieve(std::span<const Passage> corpus,
                               std::string_view query, std::size_t l) {
  std::vector<Evidence> ranked;
  ranked.reserve(corpus.size());
  for (const auto& p : corpus) {
    ranked.push_back({p.text, p.source_id, content_jaccard(query, p.text)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Evidence& a, const Evidence& b) {
    if (a.retrieval_score != b.retrieval_score) {
      return a.retrieval_score > b.retrieval_score;
    }
    return a.source_id < b.source_id;
  });
  if (ranked.size() > l) ranked.resize(l);
  return ranked;
}

double discourse(std::span<const std::string> sentences) {
  if (sentences.size() <= 1) return 2.0;
  std::size_t linked = 0;
  for (std::size_t i = 0; i + 1 < sentences.size(); ++i) {
    const auto a = content_words(sentences[i]);
    const auto b = content_words(sentences[i + 1]);
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(common));
    if (!common.empty()) ++linked;
  }
  const double fraction =
      static_cast<double>(linked) / static_cast<double>(sentences.size() - 1);
  return 4.0 * fraction - 2.0;
}

}  // namespace mock

MockBackend::MockBackend(std::vector<Passage> corpus, std::string backend_id)
    : corpus_(std::move(corpus)), id_(std::move(backend_id)) {}

json MockBackend::call(Endpoint endpoint, const json& request) {
  validate_request(endpoint, request);
  calls_.fetch_add(1);
  switch (endpoint) {
    case Endpoint::kNli:
      return encode(mock::nli(request["premise"].get<std::string>(),
                              request["hypothesis"].get<std::string>()));
    case Endpoint::kRank:
      return {{"score", mock::rank(request["query"].get<std::string>(),
                                   request["passage"].get<std::string>())}};
    case Endpoint::kLogprob:
      return encode(mock::logprob(request["context"].get<std::string>(),
                                  request["continuation"].get<std::string>()));
    case Endpoint::kRetrieve: {
      const auto ev = mock::retrieve(corpus_, request["query"].get<std::string>(),
                                     request["l"].get<std::size_t>());
      return encode(std::span<const Evidence>(ev));
    }
    case Endpoint::kDiscourse: {
      const auto sentences = request["sentences"].get<std::vector<std::string>>();
      return {{"raw", mock::discourse(sentences)}};
    }
  }
  throw InvalidArgument("unreachable endpoint");
}

Health MockBackend::health() {
  Health h;
  h.backend_id = id_;
  for (Endpoint e : kAllEndpoints) h.endpoints.emplace_back(to_string(e));
  return h;
}

}  // namespace conner::backend
