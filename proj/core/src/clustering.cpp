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
#include "stormtopics/clustering.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "stormtopics/error.hpp"
#include "stormtopics/io.hpp"

namespace stormtopics {

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::fte: return "fte";
    case ModelTag::bert: return "bert";
    case ModelTag::lda: return "lda";
    case ModelTag::btm: return "btm";
  }
  return "fte";
}

ModelTag model_tag_from_string(std::string_view name) {
  for (auto t : {ModelTag::fte, ModelTag::bert, ModelTag::lda, ModelTag::btm}) {
    if (to_string(t) == name) return t;
  }
  throw InputError("unknown model tag \"" + std::string(name) + "\"");
}

std::vector<std::vector<std::size_t>> Clustering::members() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i) out.at(labels[i]).push_back(i);
  return out;
}

void Clustering::validate() const {
  if (ids.size() != labels.size()) throw InputError("clustering ids and labels differ in length");
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen.insert(ids[i]).second) throw InputError("document \"" + ids[i] + "\" assigned twice");
    if (labels[i] >= k) {
      throw InputError("document \"" + ids[i] + "\" has topic " + std::to_string(labels[i]) +
                       " outside [0," + std::to_string(k) + ")");
    }
  }
  if (!centroids.empty() && centroids.rows() != k) throw InputError("centroid count differs from k");
}

nlohmann::json to_json(const Clustering& c) {
  nlohmann::json assignments = nlohmann::json::object();
  for (std::size_t i = 0; i < c.ids.size(); ++i) assignments[c.ids[i]] = c.labels[i];
  nlohmann::json j = {
      {"model_tag", std::string(to_string(c.model_tag))},
      {"k", c.k},
      {"assignments", std::move(assignments)},
      {"inertia", c.inertia ? nlohmann::json(*c.inertia) : nlohmann::json(nullptr)},
      {"seed", c.seed},
  };
  if (!c.centroids.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < c.centroids.rows(); ++r) {
      const auto row = c.centroids.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["centroids"] = std::move(rows);
  }
  if (!c.degenerate.empty()) j["degenerate"] = c.degenerate;
  return j;
}

Clustering clustering_from_json(const nlohmann::json& j) {
  Clustering c;
  try {
    c.model_tag = model_tag_from_string(j.at("model_tag").get<std::string>());
    c.k = j.at("k").get<std::size_t>();
    for (const auto& [id, topic] : j.at("assignments").items()) {
      c.ids.push_back(id);
      c.labels.push_back(topic.get<std::size_t>());
    }
    if (const auto& in = j.at("inertia"); !in.is_null()) c.inertia = in.get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (const auto it = j.find("centroids"); it != j.end()) {
      const auto rows = it->get<std::vector<std::vector<double>>>();
      const std::size_t dim = rows.empty() ? 0 : rows.front().size();
      std::vector<double> flat;
      for (const auto& r : rows) {
        if (r.size() != dim) throw InputError("ragged centroid matrix");
        flat.insert(flat.end(), r.begin(), r.end());
      }
      c.centroids = Matrix(rows.size(), dim, std::move(flat));
    }
    if (const auto it = j.find("degenerate"); it != j.end()) {
      c.degenerate = it->get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed clustering: ") + e.what());
  }
  c.validate();
  return c;
}

void write_clustering(const std::filesystem::path& path, const Clustering& c) {
  write_file_atomic(path, to_json(c).dump(2) + "\n");
}

Clustering read_clustering(const std::filesystem::path& path) {
  try {
    return clustering_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace stormtopics
