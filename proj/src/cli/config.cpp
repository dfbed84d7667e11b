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

#include "conner/cli/config.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "conner/backend/cache.hpp"
#include "conner/core/error.hpp"

namespace conner::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("config field '{}' has the wrong type", key));
  }
}

backend::BackendConfig parse_backend(const json& j, const std::string& role) {
  if (!j.is_object()) {
    throw ConfigError(fmt::format("backends.{} must be an object", role));
  }
  backend::BackendConfig b;
  b.backend_id = get_or<std::string>(j, "backend_id", "");
  b.base_url = get_or<std::string>(j, "base_url", "");
  b.timeout = std::chrono::milliseconds(get_or<long long>(j, "timeout_ms", 30000));
  b.max_retries = get_or<int>(j, "max_retries", 3);
  b.batch_size = get_or<std::size_t>(j, "batch_size", 1);
  b.backoff = std::chrono::milliseconds(get_or<long long>(j, "backoff_ms", 100));
  b.validate();
  return b;
}

std::string default_template(DatasetFormat f, std::string_view role) {
  const std::string prefix = f == DatasetFormat::kNqJsonl ? "nq" : "wow";
  return fmt::format("{}-{}-best", prefix, role);
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kFact: return "fact";
    case Metric::kRel: return "rel";
    case Metric::kCohSent: return "coh_sent";
    case Metric::kCohPara: return "coh_para";
    case Metric::kInfo: return "info";
    case Metric::kHelp: return "help";
    case Metric::kValidity: return "validity";
  }
  return "fact";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError(fmt::format("unknown metric '{}'", name));
}

std::vector<backend::Endpoint> required_endpoints(Metric metric, DatasetFormat format) {
  using backend::Endpoint;
  switch (metric) {
    case Metric::kFact: return {Endpoint::kRetrieve, Endpoint::kNli};
    case Metric::kRel: return {Endpoint::kRank};
    case Metric::kCohSent:
    case Metric::kInfo:
    case Metric::kHelp: return {Endpoint::kLogprob};
    case Metric::kCohPara: return {Endpoint::kDiscourse};
    case Metric::kValidity:
      if (format == DatasetFormat::kWowJsonl) return {Endpoint::kRetrieve, Endpoint::kNli};
      return {Endpoint::kNli};
  }
  return {};
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;

  const auto ds = doc.find("dataset");
  if (ds == doc.end() || !ds->is_object()) {
    throw ConfigError("config needs a 'dataset' object with path and format");
  }
  const auto ds_path = get_or<std::string>(*ds, "path", "");
  if (ds_path.empty()) throw ConfigError("dataset.path is required");
  cfg.dataset_path = resolve(base_dir, ds_path);
  cfg.format = parse_dataset_format(get_or<std::string>(*ds, "format", "nq_jsonl"));

  if (!doc.contains("seed") || !doc["seed"].is_number_integer()) {
    throw ConfigError("config field 'seed' is mandatory and must be an integer");
  }
  cfg.seed = doc["seed"].get<std::uint64_t>();

  if (const auto b = doc.find("backends"); b != doc.end()) {
    if (!b->is_object()) throw ConfigError("'backends' must be an object");
    std::optional<backend::BackendConfig> fallback;
    if (b->contains("default")) fallback = parse_backend((*b)["default"], "default");
    for (const auto& [role, value] : b->items()) {
      if (role == "default") continue;
      try {
        cfg.backends[backend::parse_endpoint(role)] = parse_backend(value, role);
      } catch (const InvalidArgument&) {
        throw ConfigError(fmt::format("unknown backend role '{}'", role));
      }
    }
    if (fallback) {
      for (auto e : backend::kAllEndpoints) cfg.backends.try_emplace(e, *fallback);
    }
  }

  if (const auto f = doc.find("factuality"); f != doc.end()) {
    cfg.factuality.l = get_or<std::size_t>(*f, "l", 10);
    try {
      cfg.factuality.mode =
          parse_factuality_mode(get_or<std::string>(*f, "mode", "min"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (cfg.factuality.l < 1) throw ConfigError("factuality.l must be >= 1");
  if (const auto h = doc.find("helpfulness"); h != doc.end()) {
    cfg.negatives = get_or<std::size_t>(*h, "u", 5);
  }
  if (cfg.negatives < 1) throw ConfigError("helpfulness.u must be >= 1");
  if (const auto v = doc.find("validity"); v != doc.end()) {
    cfg.validity_l = get_or<std::size_t>(*v, "l", 10);
  }
  if (cfg.validity_l < 1) throw ConfigError("validity.l must be >= 1");

  if (const auto g = doc.find("gamma"); g != doc.end()) {
    if (!g->is_array() || g->size() != 4) {
      throw ConfigError("'gamma' must be an array of four numbers");
    }
    try {
      cfg.gamma = selection::Gamma((*g)[0].get<double>(), (*g)[1].get<double>(),
                                   (*g)[2].get<double>(), (*g)[3].get<double>());
    } catch (const json::exception&) {
      throw ConfigError("'gamma' must be an array of four numbers");
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }

  cfg.templates.informativeness = default_template(cfg.format, "zeroshot");
  cfg.templates.answer = default_template(cfg.format, "answer");
  cfg.templates.fewshot = default_template(cfg.format, "fewshot");
  if (const auto t = doc.find("templates"); t != doc.end()) {
    if (t->contains("dir")) cfg.templates.dir = resolve(base_dir, (*t)["dir"].get<std::string>());
    cfg.templates.informativeness =
        get_or<std::string>(*t, "informativeness", cfg.templates.informativeness);
    cfg.templates.answer = get_or<std::string>(*t, "answer", cfg.templates.answer);
    cfg.templates.fewshot = get_or<std::string>(*t, "fewshot", cfg.templates.fewshot);
  }
  for (const auto* name : {&cfg.templates.informativeness, &cfg.templates.answer,
                           &cfg.templates.fewshot}) {
    try {
      selection::load_template(*name, cfg.templates.dir);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }

  cfg.concurrency = get_or<int>(doc, "concurrency", 1);
  if (cfg.concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (doc.contains("cache_dir") && !doc["cache_dir"].is_null()) {
    cfg.cache_dir = resolve(base_dir, doc["cache_dir"].get<std::string>());
  }
  if (const char* env = std::getenv("CONNER_CACHE_DIR"); env && *env) {
    cfg.cache_dir = fs::path(env);
  }
  cfg.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "out"));

  if (const auto m = doc.find("metrics"); m != doc.end() && !m->is_null()) {
    if (!m->is_array() || m->empty()) {
      throw ConfigError("'metrics' must be a non-empty array of metric names");
    }
    for (const auto& name : *m) {
      if (!name.is_string()) throw ConfigError("'metrics' must hold strings");
      cfg.metrics.insert(parse_metric(name.get<std::string>()));
    }
  } else {
    cfg.metrics.insert(std::begin(kAllMetrics), std::end(kAllMetrics));
  }

  if (const auto g = doc.find("group"); g != doc.end()) {
    cfg.group.model = get_or<std::string>(*g, "model", "");
    cfg.group.setting = get_or<std::string>(*g, "setting", "");
  }
  if (doc.contains("prompt_test_dataset")) {
    cfg.prompt_test_dataset =
        resolve(base_dir, doc["prompt_test_dataset"].get<std::string>());
  }

  for (Metric metric : cfg.metrics) {
    for (auto e : required_endpoints(metric, cfg.format)) {
      if (!cfg.backends.contains(e)) {
        throw ConfigError(fmt::format("metric '{}' needs a backend for role '{}'",
                                      to_string(metric), backend::to_string(e)));
      }
    }
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

json to_json(const RunConfig& cfg) {
  json backends = json::object();
  for (const auto& [endpoint, b] : cfg.backends) {
    backends[std::string(backend::to_string(endpoint))] = {
        {"backend_id", b.backend_id},
        {"base_url", b.base_url},
        {"timeout_ms", b.timeout.count()},
        {"max_retries", b.max_retries},
        {"batch_size", b.batch_size},
        {"backoff_ms", b.backoff.count()}};
  }
  json metrics = json::array();
  for (Metric m : cfg.metrics) metrics.push_back(to_string(m));
  const auto& w = cfg.gamma.weights();
  json doc = {
      {"dataset", {{"path", cfg.dataset_path.string()}, {"format", to_string(cfg.format)}}},
      {"backends", backends},
      {"factuality", {{"l", cfg.factuality.l}, {"mode", to_string(cfg.factuality.mode)}}},
      {"helpfulness", {{"u", cfg.negatives}}},
      {"validity", {{"l", cfg.validity_l}}},
      {"gamma", {w[0], w[1], w[2], w[3]}},
      {"templates",
       {{"dir", cfg.templates.dir ? json(cfg.templates.dir->string()) : json(nullptr)},
        {"informativeness", cfg.templates.informativeness},
        {"answer", cfg.templates.answer},
        {"fewshot", cfg.templates.fewshot}}},
      {"seed", cfg.seed},
      {"concurrency", cfg.concurrency},
      {"cache_dir", cfg.cache_dir ? json(cfg.cache_dir->string()) : json(nullptr)},
      {"output_dir", cfg.output_dir.string()},
      {"metrics", metrics},
      {"group", {{"model", cfg.group.model}, {"setting", cfg.group.setting}}},
  };
  return doc;
}

std::string config_hash(const RunConfig& cfg) {
  json doc = to_json(cfg);
  doc.erase("concurrency");
  doc.erase("cache_dir");
  doc.erase("output_dir");
  doc["dataset"].erase("path");
  for (auto& [role, b] : doc["backends"].items()) {
    b = {{"backend_id", b["backend_id"]}};
  }
  // Template content, not just its name, decides the prompts.
  for (const char* role : {"informativeness", "answer", "fewshot"}) {
    auto& t = doc["templates"][role];
    t = selection::load_template(t.get<std::string>(), cfg.templates.dir).pattern;
  }
  doc["templates"].erase("dir");
  return backend::sha256_hex(doc.dump());
}

}  // namespace conner::cli
