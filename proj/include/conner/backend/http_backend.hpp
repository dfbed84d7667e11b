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
#include <chrono>
#include <string>

#include "conner/backend/backend.hpp"

namespace conner::backend {

struct BackendConfig {
  std::string backend_id;
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::size_t batch_size = 1;
  // First retry delay; doubles on each further attempt.
  std::chrono::milliseconds backoff{100};

  void validate() const;  // throws ConfigError
};

// Protocol v1 over HTTP. Each request opens its own connection, so one
// instance can be shared by any number of threads.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);

  const std::string& id() const override { return config_.backend_id; }
  json call(Endpoint endpoint, const json& request) override;
  // Coalesces up to batch_size requests per /v1/batch/<endpoint> call.
  std::vector<json> call_batch(Endpoint endpoint,
                               std::span<const json> requests) override;
  Health health() override;

  const BackendConfig& config() const noexcept { return config_; }
  // Scoring requests actually sent (health checks excluded).
  std::size_t request_count() const noexcept { return requests_.load(); }

 private:
  json post(const std::string& path, const json& body);

  BackendConfig config_;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace conner::backend
