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

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conner/core/types.hpp"

namespace conner::backend {

using json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;
inline constexpr const char* kProtocolHeader = "x-conner-proto";

// Off-simplex responses within this distance are renormalized, beyond it
// they are rejected.
inline constexpr double kRenormalizeTolerance = 1e-3;

enum class Endpoint { kNli, kRank, kLogprob, kRetrieve, kDiscourse };

inline constexpr std::array<Endpoint, 5> kAllEndpoints = {
    Endpoint::kNli, Endpoint::kRank, Endpoint::kLogprob, Endpoint::kRetrieve,
    Endpoint::kDiscourse};

std::string_view to_string(Endpoint endpoint);
Endpoint parse_endpoint(std::string_view name);

struct TokenLogprobs {
  std::vector<std::string> tokens;
  std::vector<double> logprobs;  // natural log, each <= 0
};

struct Health {
  std::string backend_id;
  int proto = kProtocolVersion;
  std::vector<std::string> endpoints;
};

json nli_request(std::string_view premise, std::string_view hypothesis);
json rank_request(std::string_view query, std::string_view passage);
json logprob_request(std::string_view context, std::string_view continuation);
json retrieve_request(std::string_view query, std::size_t l);
json discourse_request(std::span<const std::string> sentences);

// Request shape check. Throws InvalidArgument with the offending field.
void validate_request(Endpoint endpoint, const json& request);

// Response decoders. All throw ProtocolError on contract violations.
NliVector decode_nli(const json& response);
double decode_rank(const json& response);
TokenLogprobs decode_logprob(const json& response);
std::vector<Evidence> decode_retrieve(const json& response, std::size_t l);
double decode_discourse(const json& response);

// Runs the decoder matching `endpoint`; used to keep malformed responses out
// of the cache.
void check_response(Endpoint endpoint, const json& request,
                    const json& response);

json encode(const NliVector& v);
json encode(const TokenLogprobs& t);
json encode(std::span<const Evidence> evidence);
json encode(const Health& h);
Health decode_health(const json& response);

// Whitespace-collapses every string value, recursively. Object keys are
// already ordered by nlohmann::json, so dump() of the result is canonical.
json canonicalize(const json& request);

}  // namespace conner::backend
