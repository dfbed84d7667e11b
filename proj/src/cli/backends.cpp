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

#include <algorithm>
#include <map>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "conner/backend/mock.hpp"
#include "conner/cli/run.hpp"
#include "conner/core/error.hpp"

namespace conner::cli {

using backend::BackendConfig;
using backend::BackendPtr;
using backend::Endpoint;

BackendPtr make_http_backend(const BackendConfig& cfg) {
  return std::make_shared<backend::HttpBackend>(cfg);
}

std::size_t BackendSet::cache_hits() const {
  std::size_t n = 0;
  for (const auto& c : cached) n += c->hits();
  return n;
}

std::size_t BackendSet::cache_misses() const {
  std::size_t n = 0;
  for (const auto& c : cached) n += c->misses();
  return n;
}

std::size_t BackendSet::backend_calls() const {
  std::size_t n = 0;
  for (const auto& t : transports) {
    if (auto http = std::dynamic_pointer_cast<backend::HttpBackend>(t)) {
      n += http->request_count();
    } else if (auto mock = std::dynamic_pointer_cast<backend::MockBackend>(t)) {
      n += mock->call_count();
    }
  }
  return n;
}

BackendSet connect_backends(const RunConfig& cfg, const BackendFactory& factory) {
  std::map<std::pair<std::string, std::string>, std::shared_ptr<backend::CachedBackend>>
      by_transport;
  std::map<std::string, std::shared_ptr<backend::ResponseCache>> caches;
  std::vector<BackendPtr> transports;
  std::vector<std::shared_ptr<backend::CachedBackend>> cached;
  backend::Scorer::Routing routing{};

  for (const auto& [endpoint, bc] : cfg.backends) {
    const auto key = std::make_pair(bc.backend_id, bc.base_url);
    auto it = by_transport.find(key);
    if (it == by_transport.end()) {
      BackendPtr transport = factory(bc);
      backend::Health health;
      try {
        health = transport->health();
      } catch (const Error& e) {
        throw BackendUnavailable(fmt::format("backend '{}' at {} is unavailable: {}",
                                             bc.backend_id, bc.base_url, e.what()));
      }
      if (health.backend_id != bc.backend_id) {
        spdlog::warn("backend at {} reports id '{}', configured as '{}'", bc.base_url,
                     health.backend_id, bc.backend_id);
      }
      auto& cache = caches[bc.backend_id];
      if (!cache) cache = std::make_shared<backend::ResponseCache>(bc.backend_id, cfg.cache_dir);
      auto wrapped = std::make_shared<backend::CachedBackend>(transport, cache);
      it = by_transport.emplace(key, wrapped).first;
      transports.push_back(transport);
      cached.push_back(wrapped);

      std::vector<std::string> missing;
      for (const auto& [e, other] : cfg.backends) {
        if (other.backend_id != bc.backend_id || other.base_url != bc.base_url) continue;
        const auto name = std::string(backend::to_string(e));
        if (!health.endpoints.empty() &&
            std::find(health.endpoints.begin(), health.endpoints.end(), name) ==
                health.endpoints.end()) {
          missing.push_back(name);
        }
      }
      if (!missing.empty()) {
        throw BackendUnavailable(fmt::format("backend '{}' does not serve: {}",
                                             bc.backend_id, fmt::join(missing, ", ")));
      }
    }
    routing[static_cast<std::size_t>(endpoint)] = it->second;
  }
  return BackendSet{backend::Scorer(routing), std::move(transports), std::move(cached)};
}

}  // namespace conner::cli
