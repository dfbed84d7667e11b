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

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conner/core/types.hpp"

namespace conner::cli {

enum class DatasetFormat { kNqJsonl, kWowJsonl };

DatasetFormat parse_dataset_format(std::string_view name);
std::string_view to_string(DatasetFormat format);

inline constexpr std::string_view kRatingNames[] = {
    "factuality", "relevance", "coherence", "informativeness", "helpfulness",
    "validity"};

// JSON Lines, one record per line; blank lines are skipped. nq records are
// span QA, wow records open dialogue. Throws SchemaError naming the line and
// field, including for duplicate ids.
std::vector<EvalItem> parse_dataset(std::istream& in, DatasetFormat format);
std::vector<EvalItem> parse_dataset(const std::filesystem::path& path,
                                    DatasetFormat format);

EvalItem parse_record(const nlohmann::json& record, DatasetFormat format,
                      std::size_t line);

// {"human_ratings": {...}} validated against {0, 1, 2}.
std::map<std::string, int> parse_ratings(const nlohmann::json& ratings,
                                         std::size_t line);

// Lines with "id" and "human_ratings"; dataset files qualify.
std::map<std::string, std::map<std::string, int>> parse_annotations(
    const std::filesystem::path& path);

}  // namespace conner::cli
