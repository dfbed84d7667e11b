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

#include "conner/backend/backend.hpp"

namespace conner::backend {

std::vector<json> Backend::call_batch(Endpoint endpoint,
                                      std::span<const json> requests) {
  std::vector<json> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(call(endpoint, r));
  return out;
}

}  // namespace conner::backend
