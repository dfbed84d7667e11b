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

#include "conner/backend/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "conner/core/error.hpp"
#include "conner/core/text.hpp"

namespace conner::backend {
namespace {

const json& field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ProtocolError(fmt::format("response lacks field '{}'", name));
  }
  return obj.at(name);
}

double number(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_number()) {
    throw ProtocolError(fmt::format("field '{}' is not a number", name));
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ProtocolError(fmt::format("field '{}' is not finite", name));
  }
  return d;
}

const std::string& request_string(const json& req, const char* name,
                                  bool allow_empty) {
  if (!req.is_object() || !req.contains(name) || !req.at(name).is_string()) {
    throw InvalidArgument(fmt::format("request field '{}' must be a string", name));
  }
  const auto& s = req.at(name).get_ref<const std::string&>();
  if (!allow_empty && collapse_whitespace(s).empty()) {
    throw InvalidArgument(fmt::format("request field '{}' is empty", name));
  }
  return s;
}

}  // namespace

std::string_view to_string(Endpoint endpoint) {
  switch (endpoint) {
    case Endpoint::kNli: return "nli";
    case Endpoint::kRank: return "rank";
    case Endpoint::kLogprob: return "logprob";
    case Endpoint::kRetrieve: return "retrieve";
    case Endpoint::kDiscourse: return "discourse";
  }
  return "nli";
}

Endpoint parse_endpoint(std::string_view name) {
  for (Endpoint e : kAllEndpoints) {
    if (to_string(e) == name) return e;
  }
  throw InvalidArgument(fmt::format("unknown endpoint '{}'", name));
}

json nli_request(std::string_view premise, std::string_view hypothesis) {
  return {{"premise", premise}, {"hypothesis", hypothesis}};
}

json rank_request(std::string_view query, std::string_view passage) {
  return {{"query", query}, {"passage", passage}};
}

json logprob_request(std::string_view context, std::string_view continuation) {
  return {{"context", context}, {"continuation", continuation}};
}

json retrieve_request(std::string_view query, std::size_t l) {
  return {{"query", query}, {"l", l}};
}

json discourse_request(std::span<const std::string> sentences) {
  return {{"sentences", json(std::vector<std::string>(sentences.begin(),
                                                      sentences.end()))}};
}

void validate_request(Endpoint endpoint, const json& request) {
  switch (endpoint) {
    case Endpoint::kNli:
      request_string(request, "premise", false);
      request_string(request, "hypothesis", false);
      return;
    case Endpoint::kRank:
      request_string(request, "query", false);
      request_string(request, "passage", false);
      return;
    case Endpoint::kLogprob:
      request_string(request, "context", true);
      request_string(request, "continuation", false);
      return;
    case Endpoint::kRetrieve: {
      request_string(request, "query", true);
      const auto it = request.find("l");
      if (it == request.end() || !it->is_number_integer() ||
          it->get<long long>() < 1) {
        throw InvalidArgument("request field 'l' must be a positive integer");
      }
      return;
    }
    case Endpoint::kDiscourse: {
      const auto it = request.find("sentences");
      if (it == request.end() || !it->is_array() || it->empty()) {
        throw InvalidArgument("request field 'sentences' must be a non-empty array");
      }
      for (const auto& s : *it) {
        if (!s.is_string()) {
          throw InvalidArgument("request field 'sentences' must hold strings");
        }
      }
      return;
    }
  }
}

NliVector decode_nli(const json& response) {
  double e = number(response, "entail");
  double n = number(response, "neutral");
  double c = number(response, "contradict");
  for (double* v : {&e, &n, &c}) {
    if (*v < -kRenormalizeTolerance || *v > 1.0 + kRenormalizeTolerance) {
      throw ProtocolError(
          fmt::format("NLI component {} far outside [0,1]", *v));
    }
    *v = std::clamp(*v, 0.0, 1.0);
  }
  const double sum = e + n + c;
  if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
    throw ProtocolError(fmt::format("NLI response sums to {}", sum));
  }
  return NliVector(e / sum, n / sum, c / sum);
}

double decode_rank(const json& response) {
  const double s = number(response, "score");
  if (s < -kRenormalizeTolerance || s > 1.0 + kRenormalizeTolerance) {
    throw ProtocolError(fmt::format("rank score {} outside [0,1]", s));
  }
  return std::clamp(s, 0.0, 1.0);
}

TokenLogprobs decode_logprob(const json& response) {
  const json& tokens = field(response, "tokens");
  const json& logprobs = field(response, "logprobs");
  if (!tokens.is_array() || !logprobs.is_array()) {
    throw ProtocolError("logprob response fields must be arrays");
  }
  if (tokens.size() != logprobs.size()) {
    throw ProtocolError(fmt::format("logprob response has {} tokens but {} logprobs",
                                    tokens.size(), logprobs.size()));
  }
  TokenLogprobs out;
  out.tokens.reserve(tokens.size());
  out.logprobs.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_string() || !logprobs[i].is_number()) {
      throw ProtocolError("logprob response has a mistyped entry");
    }
    const double lp = logprobs[i].get<double>();
    if (!std::isfinite(lp) || lp > 0.0) {
      throw ProtocolError(fmt::format("logprob {} is not finite and <= 0", lp));
    }
    out.tokens.push_back(tokens[i].get<std::string>());
    out.logprobs.push_back(lp);
  }
  return out;
}

std::vector<Evidence> decode_retrieve(const json& response, std::size_t l) {
  const json& list = field(response, "evidence");
  if (!list.is_array()) throw ProtocolError("'evidence' must be an array");
  if (list.size() > l) {
    throw ProtocolError(
        fmt::format("retrieve returned {} items for l = {}", list.size(), l));
  }
  std::vector<Evidence> out;
  out.reserve(list.size());
  for (const auto& item : list) {
    const json& text = field(item, "text");
    const json& source = field(item, "source_id");
    if (!text.is_string() || !source.is_string() ||
        text.get_ref<const std::string&>().empty()) {
      throw ProtocolError("evidence item needs non-empty text and a source_id");
    }
    const double score = number(item, "score");
    if (!out.empty() && score > out.back().retrieval_score) {
      throw ProtocolError("evidence is not sorted by descending score");
    }
    out.push_back({text.get<std::string>(), source.get<std::string>(), score});
  }
  return out;
}

double decode_discourse(const json& response) { return number(response, "raw"); }

void check_response(Endpoint endpoint, const json& request,
                    const json& response) {
  switch (endpoint) {
    case Endpoint::kNli: decode_nli(response); return;
    case Endpoint::kRank: decode_rank(response); return;
    case Endpoint::kLogprob: decode_logprob(response); return;
    case Endpoint::kRetrieve:
      decode_retrieve(response, request.at("l").get<std::size_t>());
      return;
    case Endpoint::kDiscourse: decode_discourse(response); return;
  }
}

json encode(const NliVector& v) {
  return {{"entail", v.entail()},
          {"neutral", v.neutral()},
          {"contradict", v.contradict()}};
}

json encode(const TokenLogprobs& t) {
  return {{"tokens", t.tokens}, {"logprobs", t.logprobs}};
}

json encode(std::span<const Evidence> evidence) {
  json list = json::array();
  for (const auto& e : evidence) {
    list.push_back(
        {{"text", e.text}, {"source_id", e.source_id}, {"score", e.retrieval_score}});
  }
  return {{"evidence", std::move(list)}};
}

json encode(const Health& h) {
  return {{"backend_id", h.backend_id}, {"proto", h.proto}, {"endpoints", h.endpoints}};
}

Health decode_health(const json& response) {
  Health h;
  const json& id = field(response, "backend_id");
  const json& proto = field(response, "proto");
  const json& eps = field(response, "endpoints");
  if (!id.is_string() || !proto.is_number_integer() || !eps.is_array()) {
    throw ProtocolError("malformed health response");
  }
  h.backend_id = id.get<std::string>();
  h.proto = proto.get<int>();
  for (const auto& e : eps) {
    if (!e.is_string()) throw ProtocolError("malformed health endpoint list");
    h.endpoints.push_back(e.get<std::string>());
  }
  return h;
}

json canonicalize(const json& request) {
  if (request.is_string()) {
    return collapse_whitespace(request.get_ref<const std::string&>());
  }
  if (request.is_array()) {
    json out = json::array();
    for (const auto& v : request) out.push_back(canonicalize(v));
    return out;
  }
  if (request.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : request.items()) out[k] = canonicalize(v);
    return out;
  }
  return request;
}

}  // namespace conner::backend
