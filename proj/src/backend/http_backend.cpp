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

#include "conner/backend/http_backend.hpp"

#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "conner/core/error.hpp"

namespace conner::backend {

void BackendConfig::validate() const {
  if (backend_id.empty()) throw ConfigError("backend_id must be non-empty");
  if (base_url.empty()) {
    throw ConfigError(fmt::format("backend '{}' has no base_url", backend_id));
  }
  if (batch_size < 1) {
    throw ConfigError(fmt::format("backend '{}': batch_size must be >= 1", backend_id));
  }
  if (max_retries < 0) {
    throw ConfigError(fmt::format("backend '{}': max_retries must be >= 0", backend_id));
  }
}

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  config_.validate();
}

json HttpBackend::post(const std::string& path, const json& body) {
  const std::string payload = body.dump();
  const httplib::Headers headers = {
      {kProtocolHeader, std::to_string(kProtocolVersion)}};
  std::string last_error;
  auto delay = config_.backoff;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    requests_.fetch_add(1);
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw ProtocolError(fmt::format("{} {}: invalid JSON: {}", config_.backend_id,
                                        path, e.what()));
      }
    }
    if (res->status == 503) {
      last_error = "503 overloaded";
      continue;
    }
    if (res->status == 400) {
      throw InvalidArgument(
          fmt::format("{} {}: rejected: {}", config_.backend_id, path, res->body));
    }
    throw ProtocolError(fmt::format("{} {}: HTTP {}", config_.backend_id, path,
                                    res->status));
  }
  throw BackendUnavailable(fmt::format("{} {}: giving up after {} attempts: {}",
                                       config_.backend_id, path,
                                       config_.max_retries + 1, last_error));
}

json HttpBackend::call(Endpoint endpoint, const json& request) {
  return post(fmt::format("/v1/{}", to_string(endpoint)), request);
}

std::vector<json> HttpBackend::call_batch(Endpoint endpoint,
                                          std::span<const json> requests) {
  if (config_.batch_size <= 1) return Backend::call_batch(endpoint, requests);
  std::vector<json> out;
  out.reserve(requests.size());
  const std::string path = fmt::format("/v1/batch/{}", to_string(endpoint));
  for (std::size_t begin = 0; begin < requests.size(); begin += config_.batch_size) {
    const auto chunk = requests.subspan(
        begin, std::min(config_.batch_size, requests.size() - begin));
    json body = {{"requests", json(std::vector<json>(chunk.begin(), chunk.end()))}};
    json res = post(path, body);
    if (!res.is_object() || !res.contains("responses") ||
        !res["responses"].is_array() || res["responses"].size() != chunk.size()) {
      throw ProtocolError(fmt::format("{} {}: batch response is not index-aligned",
                                      config_.backend_id, path));
    }
    for (auto& r : res["responses"]) out.push_back(std::move(r));
  }
  return out;
}

Health HttpBackend::health() {
  std::string last_error;
  auto delay = config_.backoff;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    auto res = client.Get("/v1/health");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = fmt::format("HTTP {}", res->status);
      continue;
    }
    try {
      return decode_health(json::parse(res->body));
    } catch (const json::parse_error& e) {
      throw ProtocolError(fmt::format("{}: invalid health JSON: {}",
                                      config_.backend_id, e.what()));
    }
  }
  throw BackendUnavailable(fmt::format("{} at {}: health check failed: {}",
                                       config_.backend_id, config_.base_url,
                                       last_error));
}

}  // namespace conner::backend
