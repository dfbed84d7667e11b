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

#include "conner/backend/cache.hpp"

#include <array>
#include <fmt/format.h>
#include <openssl/sha.h>
#include <spdlog/spdlog.h>

#include "conner/core/error.hpp"

namespace conner::backend {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(),
         digest.data());
  std::string hex;
  hex.reserve(digest.size() * 2);
  for (unsigned char b : digest) hex += fmt::format("{:02x}", b);
  return hex;
}

CacheKey CacheKey::of(std::string backend_id, Endpoint endpoint,
                      const json& request) {
  return {std::move(backend_id), endpoint, sha256_hex(canonicalize(request).dump())};
}

namespace {

std::string file_stem(const std::string& backend_id) {
  std::string stem;
  for (char c : backend_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '_' || c == '.';
    stem.push_back(ok ? c : '_');
  }
  return stem;
}

}  // namespace

ResponseCache::ResponseCache(std::string backend_id,
                             std::optional<std::filesystem::path> dir)
    : backend_id_(std::move(backend_id)) {
  if (!dir) return;
  std::filesystem::create_directories(*dir);
  file_ = *dir / (file_stem(backend_id_) + ".jsonl");
  std::ifstream in(*file_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      const auto& response = rec.at("response");
      if (rec.at("backend_id").get<std::string>() != backend_id_ ||
          rec.at("check").get<std::string>() != sha256_hex(response.dump())) {
        throw std::runtime_error("checksum mismatch");
      }
      index_[{parse_endpoint(rec.at("endpoint").get<std::string>()),
              rec.at("key").get<std::string>()}] = response;
    } catch (const std::exception& e) {
      ++dropped_;
      spdlog::warn("cache {}:{}: dropping corrupt record ({})", file_->string(),
                   lineno, e.what());
    }
  }
  in.close();
  out_.open(*file_, std::ios::app);
  if (!out_) {
    throw ConfigError(fmt::format("cannot append to cache file '{}'", file_->string()));
  }
}

std::optional<json> ResponseCache::load(const CacheKey& key) const {
  std::shared_lock lock(mu_);
  const auto it = index_.find({key.endpoint, key.request_digest});
  if (it == index_.end()) return std::nullopt;
  return std::optional<json>(std::in_place, it->second);
}

void ResponseCache::store(const CacheKey& key, const json& response) {
  {
    std::unique_lock lock(mu_);
    index_[{key.endpoint, key.request_digest}] = response;
  }
  if (!file_) return;
  const json rec = {{"backend_id", backend_id_},
                    {"endpoint", to_string(key.endpoint)},
                    {"key", key.request_digest},
                    {"check", sha256_hex(response.dump())},
                    {"response", response}};
  std::lock_guard lock(append_mu_);
  out_ << rec.dump() << '\n';
  out_.flush();
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return index_.size();
}

CachedBackend::CachedBackend(BackendPtr inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
  if (!inner_ || !cache_) throw InvalidArgument("CachedBackend needs a backend and a cache");
  if (cache_->backend_id() != inner_->id()) {
    throw InvalidArgument(fmt::format("cache for '{}' attached to backend '{}'",
                                      cache_->backend_id(), inner_->id()));
  }
}

json CachedBackend::call(Endpoint endpoint, const json& request) {
  const auto key = CacheKey::of(inner_->id(), endpoint, request);
  if (auto hit = cache_->load(key)) {
    hits_.fetch_add(1);
    return *std::move(hit);
  }
  misses_.fetch_add(1);
  json response = inner_->call(endpoint, request);
  check_response(endpoint, request, response);
  cache_->store(key, response);
  return response;
}

std::vector<json> CachedBackend::call_batch(Endpoint endpoint,
                                            std::span<const json> requests) {
  std::vector<json> out(requests.size());
  std::vector<CacheKey> keys;
  std::vector<std::size_t> missing;
  std::vector<json> to_fetch;
  keys.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    keys.push_back(CacheKey::of(inner_->id(), endpoint, requests[i]));
    if (auto hit = cache_->load(keys.back())) {
      hits_.fetch_add(1);
      out[i] = *std::move(hit);
    } else {
      misses_.fetch_add(1);
      missing.push_back(i);
      to_fetch.push_back(requests[i]);
    }
  }
  if (missing.empty()) return out;
  auto fetched = inner_->call_batch(endpoint, to_fetch);
  if (fetched.size() != missing.size()) {
    throw ProtocolError("batch response is not index-aligned");
  }
  for (std::size_t k = 0; k < missing.size(); ++k) {
    const std::size_t i = missing[k];
    check_response(endpoint, requests[i], fetched[k]);
    cache_->store(keys[i], fetched[k]);
    out[i] = std::move(fetched[k]);
  }
  return out;
}

}  // namespace conner::backend
