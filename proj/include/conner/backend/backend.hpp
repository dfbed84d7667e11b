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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "conner/backend/protocol.hpp"

namespace conner::backend {

// One scoring service speaking protocol v1, at the JSON level. Typed access
// goes through Scorer.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const std::string& id() const = 0;
  virtual json call(Endpoint endpoint, const json& request) = 0;
  // Index-aligned with `requests`; must equal sequential call()s.
  virtual std::vector<json> call_batch(Endpoint endpoint,
                                       std::span<const json> requests);
  virtual Health health() = 0;
};

using BackendPtr = std::shared_ptr<Backend>;

}  // namespace conner::backend
