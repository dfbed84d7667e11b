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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conner/backend/http_backend.hpp"
#include "conner/backend/protocol.hpp"
#include "conner/cli/dataset.hpp"
#include "conner/intrinsic/intrinsic.hpp"
#include "conner/selection/selection.hpp"
#include "conner/stats/report.hpp"

namespace conner::cli {

enum class Metric { kFact, kRel, kCohSent, kCohPara, kInfo, kHelp, kValidity };

inline constexpr Metric kAllMetrics[] = {Metric::kFact,    Metric::kRel,
                                         Metric::kCohSent, Metric::kCohPara,
                                         Metric::kInfo,    Metric::kHelp,
                                         Metric::kValidity};

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);  // throws ConfigError

// Endpoints a metric needs for a dataset format.
std::vector<backend::Endpoint> required_endpoints(Metric metric, DatasetFormat format);

struct TemplateNames {
  std::optional<std::filesystem::path> dir;
  std::string informativeness;
  std::string answer;
  std::string fewshot;
};

// Everything a run depends on. Relative paths in the file are resolved
// against the config file's directory.
struct RunConfig {
  std::filesystem::path dataset_path;
  DatasetFormat format = DatasetFormat::kNqJsonl;
  std::map<backend::Endpoint, backend::BackendConfig> backends;
  intrinsic::FactualityConfig factuality;
  std::size_t negatives = 5;    // u, helpfulness baselines
  std::size_t validity_l = 10;  // evidence for open-ended validity
  selection::Gamma gamma = selection::Gamma::uniform();
  TemplateNames templates;
  std::uint64_t seed = 0;
  int concurrency = 1;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path output_dir;
  std::set<Metric> metrics;
  stats::GroupKey group;
  std::optional<std::filesystem::path> prompt_test_dataset;
};

// Throws ConfigError. The CONNER_CACHE_DIR environment variable, when set,
// replaces cache_dir.
RunConfig parse_config(const nlohmann::json& doc,
                       const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Normalized form with defaults filled in.
nlohmann::json to_json(const RunConfig& cfg);

// SHA-256 over the fields that can change a score. Output and cache
// locations, concurrency and transport settings (URL, timeouts, retries,
// batch size) are left out: they never change a result.
std::string config_hash(const RunConfig& cfg);

}  // namespace conner::cli
