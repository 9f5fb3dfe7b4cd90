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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stormtopics/clustering.hpp"
#include "stormtopics/coherence.hpp"
#include "stormtopics/corpus.hpp"
#include "stormtopics/embedding_io.hpp"

namespace stormtopics {

// phi marks native top words of LDA/BTM topic-word distributions.
enum class KeywordStrategy { tfidf, attention, combined, phi };

std::string_view to_string(KeywordStrategy s);
KeywordStrategy keyword_strategy_from_string(std::string_view name);

struct ScoredTerm {
  std::string term;
  double score = 0.0;

  friend bool operator==(const ScoredTerm&, const ScoredTerm&) = default;
};

struct TopicKeywords {
  std::size_t topic = 0;
  KeywordStrategy strategy = KeywordStrategy::tfidf;
  std::vector<ScoredTerm> ranked;  // descending score, ties by term
  bool empty_cluster = false;

  double score_of(std::string_view term) const;  // 0 when absent
  std::vector<std::string> terms(std::size_t limit = SIZE_MAX) const;

  friend bool operator==(const TopicKeywords&, const TopicKeywords&) = default;
};

inline constexpr std::size_t kEvaluationKeywords = 10;

struct TfIdfConfig {
  double max_document_frequency = 1.0;  // mdf in (0, 1]
  bool sublinear_tf = false;
  bool use_phrases = false;
  PhraseConfig phrases;
};

// Each topic's documents are concatenated into one cluster-document. With k
// cluster-documents: terms whose cluster-document frequency exceeds mdf * k
// are removed; tf is the raw count, or 1 + ln(count) when sublinear;
// idf = ln((1 + k) / (1 + df)) + 1; score = tf * idf.
std::vector<TopicKeywords> cluster_tfidf(const Clustering& clustering, std::span<const Document> docs,
                                         const TfIdfConfig& cfg);

struct AttentionOptions {
  bool normalize_per_tweet = false;  // divide each tweet's scores by their sum
};

struct AttentionKeywords {
  std::vector<TopicKeywords> topics;
  std::size_t skipped_docs = 0;  // clustered ids without an attention record
};

// Sums each term's attention over the tweets of a topic. Surface tokens are
// cleaned with the corpus rules first; a token splitting into several words
// credits its score to each of them.
AttentionKeywords attention_scores(const Clustering& clustering, const EmbeddingBundle& bundle,
                                   const PreprocessConfig& preprocess, const AttentionOptions& opts = {});

// score = tfidf * attention; terms missing from either side are dropped.
TopicKeywords combined_scores(const TopicKeywords& tfidf, const TopicKeywords& attention);
std::vector<TopicKeywords> combined_scores(std::span<const TopicKeywords> tfidf,
                                           std::span<const TopicKeywords> attention);

// Keywords straight from a topic-word matrix (LDA/BTM).
std::vector<TopicKeywords> phi_keywords(const Matrix& phi, std::span<const std::string> vocabulary, std::size_t m);

std::vector<std::vector<std::string>> keyword_terms(std::span<const TopicKeywords> topics,
                                                    std::size_t limit = kEvaluationKeywords);

struct GridCell {
  double mdf = 1.0;
  bool sublinear = false;
  bool phrases = false;
  KeywordStrategy strategy = KeywordStrategy::tfidf;
};

struct GridRow {
  std::size_t k = 0;
  GridCell cell;
  double c_v = 0.0;
};

struct GridOptions {
  std::vector<double> mdf{0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<bool> sublinear{false, true};
  std::vector<bool> phrases{false, true};
  std::vector<KeywordStrategy> strategies{KeywordStrategy::tfidf, KeywordStrategy::attention,
                                          KeywordStrategy::combined};
  std::size_t topn = kEvaluationKeywords;
  PhraseConfig phrase_config;
  AttentionOptions attention;
};

struct GridResult {
  std::vector<GridRow> rows;  // enumeration order: mdf, sublinear, phrases, strategy
  std::size_t best = 0;       // argmax C_V among rows with k == k_for_selection
  std::vector<TopicKeywords> best_keywords;
};

// Scores every cell by C_V against the clustered documents (phrased when the
// cell enables phrasing). The bundle may be null only when no attention
// strategy is requested. Ties keep the first row in enumeration order.
GridResult grid_search(const Clustering& clustering, std::span<const Document> docs, const EmbeddingBundle* bundle,
                       const PreprocessConfig& preprocess, const CoherenceConfig& coherence,
                       std::size_t k_for_selection, const GridOptions& opts = {});

// CSV: topic,strategy,rank,term,score (rank from 1).
std::string keywords_to_csv(std::span<const TopicKeywords> topics, std::size_t limit = SIZE_MAX);
nlohmann::json keywords_to_json(std::span<const TopicKeywords> topics, ModelTag tag, std::size_t k);

struct KeywordTable {
  ModelTag model_tag = ModelTag::fte;
  std::size_t k = 0;
  std::vector<TopicKeywords> topics;
};
KeywordTable keywords_from_json(const nlohmann::json& j);
KeywordTable read_keywords(const std::filesystem::path& path);

// CSV: k,mdf,sublinear,phrases,strategy,c_v
std::string grid_to_csv(std::span<const GridRow> rows);

}  // namespace stormtopics
