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
#include <utility>
#include <vector>

#include "conner/backend/backend.hpp"

namespace conner::backend {

// Typed, validated access to the five endpoints. Each endpoint may be served
// by a different backend.
class Scorer {
 public:
  using Routing = std::array<BackendPtr, kAllEndpoints.size()>;

  explicit Scorer(BackendPtr all);
  explicit Scorer(Routing routing);

  NliVector nli(std::string_view premise, std::string_view hypothesis) const;
  // Order-preserving; goes through the batch endpoint.
  std::vector<NliVector> nli_batch(
      std::span<const std::pair<std::string, std::string>> pairs) const;
  double rank(std::string_view query, std::string_view passage) const;
  TokenLogprobs token_logprobs(std::string_view context,
                               std::string_view continuation) const;
  std::vector<Evidence> retrieve(std::string_view query, std::size_t l) const;
  double discourse_raw(std::span<const std::string> sentences) const;

  const BackendPtr& backend(Endpoint endpoint) const;
  bool has(Endpoint endpoint) const;

 private:
  Routing routing_;
};

}  // namespace conner::backend
