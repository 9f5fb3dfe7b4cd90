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

#include <nlohmann/json.hpp>

#include "stormtopics/coherence.hpp"
#include "stormtopics/corpus.hpp"
#include "stormtopics/keywords.hpp"
#include "stormtopics/kmeans.hpp"
#include "stormtopics/prob_topics.hpp"

namespace stormtopics::cli {

// Inclusive topic-count range, written "5..15" or "9".
struct KRange {
  std::size_t lo = 5;
  std::size_t hi = 15;

  std::vector<std::size_t> values() const;
  std::string str() const;
  friend bool operator==(const KRange&, const KRange&) = default;
};

KRange parse_k_range(std::string_view text);

struct PreprocessSettings {
  TokenPolicy hashtag_policy = TokenPolicy::strip_symbol_keep_body;
  TokenPolicy mention_policy = TokenPolicy::strip_symbol_keep_body;
  std::string stopwords = "en-v1";  // bundled id or a path to a word list
  std::size_t min_token_len = 2;

  PreprocessConfig resolve() const;
};

// "grid" searches the tf-idf/attention grid; the rest name one strategy.
std::string_view validate_keyword_mode(std::string_view mode);

struct KeywordSettings {
  std::string mode = "grid";  // tfidf | attention | combined | grid
  TfIdfConfig tfidf;
  bool normalize_attention = false;
  std::size_t topn = kEvaluationKeywords;
};

struct PipelineConfig {
  std::optional<std::uint64_t> seed;
  KRange k_sweep;
  std::size_t select_k = 9;
  PreprocessSettings preprocess;
  KMeansConfig kmeans;
  LdaConfig lda;
  BtmConfig btm;
  KeywordSettings keywords;
  CoherenceConfig coherence;
  std::size_t sets_per_topic = 10;
};

// Unknown keys are rejected so typos do not silently fall back to defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const PreprocessSettings& p);
nlohmann::json to_json(const KMeansConfig& k);
nlohmann::json to_json(const LdaConfig& c);
nlohmann::json to_json(const BtmConfig& c);
nlohmann::json to_json(const KeywordSettings& k);
nlohmann::json to_json(const CoherenceConfig& c);
nlohmann::json to_json(const PipelineConfig& c);

// Flag, then config file, then STORMTOPICS_SEED, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const PipelineConfig& cfg);

}  // namespace stormtopics::cli
