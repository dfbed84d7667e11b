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
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "conner/backend/backend.hpp"

namespace conner::backend {

struct CacheKey {
  std::string backend_id;
  Endpoint endpoint = Endpoint::kNli;
  std::string request_digest;  // hex SHA-256 of canonicalize(request).dump()

  static CacheKey of(std::string backend_id, Endpoint endpoint,
                     const json& request);

  auto operator<=>(const CacheKey&) const = default;
};

std::string sha256_hex(std::string_view data);

// Response store for one backend_id. With a directory, every store() appends
// one JSON line to <dir>/<backend_id>.jsonl and the file is replayed on
// construction; without one the cache lives in memory only.
//
// Each record carries a digest of its response. Records that fail to parse or
// whose digest mismatches are dropped with a warning, which turns them into
// misses and makes the next lookup re-fetch.
class ResponseCache {
 public:
  ResponseCache(std::string backend_id,
                std::optional<std::filesystem::path> dir);

  const std::string& backend_id() const noexcept { return backend_id_; }

  std::optional<json> load(const CacheKey& key) const;
  void store(const CacheKey& key, const json& response);

  std::size_t size() const;
  std::size_t dropped_records() const noexcept { return dropped_; }
  const std::optional<std::filesystem::path>& file() const noexcept {
    return file_;
  }

 private:
  using IndexKey = std::pair<Endpoint, std::string>;

  std::string backend_id_;
  std::optional<std::filesystem::path> file_;
  mutable std::shared_mutex mu_;
  std::map<IndexKey, json> index_;
  std::mutex append_mu_;
  std::ofstream out_;
  std::size_t dropped_ = 0;
};

// Serves identical requests (same CacheKey) from the store; only misses
// reach the wrapped backend. Responses are validated before being stored.
class CachedBackend final : public Backend {
 public:
  CachedBackend(BackendPtr inner, std::shared_ptr<ResponseCache> cache);

  const std::string& id() const override { return inner_->id(); }
  json call(Endpoint endpoint, const json& request) override;
  std::vector<json> call_batch(Endpoint endpoint,
                               std::span<const json> requests) override;
  Health health() override { return inner_->health(); }

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }
  const BackendPtr& inner() const noexcept { return inner_; }

 private:
  BackendPtr inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace conner::backend
