// Copyright 2026 The stormtopics Authors.
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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stormtopics/matrix.hpp"

namespace stormtopics {

enum class ModelTag { fte, bert, lda, btm };

std::string_view to_string(ModelTag tag);
ModelTag model_tag_from_string(std::string_view name);

// A partition of document ids into k topics. ids and labels are parallel.
struct Clustering {
  ModelTag model_tag = ModelTag::fte;
  std::size_t k = 0;
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  Matrix centroids;               // k x dim for K-Means output, empty otherwise
  std::optional<double> inertia;  // K-Means only
  std::uint64_t seed = 0;
  std::vector<std::string> degenerate;  // ids assigned by the tie rule alone

  std::size_t size() const { return ids.size(); }

  // Positions in ids, grouped by topic.
  std::vector<std::vector<std::size_t>> members() const;

  // Throws InputError on length mismatch, duplicate ids or labels >= k.
  void validate() const;
};

// {"model_tag","k","assignments":{id:topic},"inertia","seed"} plus optional
// "centroids" and "degenerate". Reading sorts ids lexicographically.
nlohmann::json to_json(const Clustering& c);
Clustering clustering_from_json(const nlohmann::json& j);

void write_clustering(const std::filesystem::path& path, const Clustering& c);
Clustering read_clustering(const std::filesystem::path& path);

}  // namespace stormtopics
