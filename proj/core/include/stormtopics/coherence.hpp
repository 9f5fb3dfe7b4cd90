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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stormtopics/corpus.hpp"

namespace stormtopics {

enum class ContextScope { topic_union, full_vocabulary };
enum class CvSegmentation { pairwise, one_set };
enum class CoherenceMetric { c_v, c_npmi };

std::string_view to_string(CoherenceMetric metric);
CoherenceMetric coherence_metric_from_string(std::string_view name);  // "cv" | "cnpmi"

struct CoherenceConfig {
  std::size_t window = 10;  // sliding window for C_NPMI
  double epsilon = 1e-12;
  double gamma = 1.0;
  std::size_t topn = 10;
  ContextScope context_scope = ContextScope::topic_union;
  CvSegmentation segmentation = CvSegmentation::pairwise;
  // When set, windows start at every token and shrink at the document end;
  // otherwise a document no longer than the window is a single context and
  // longer ones yield only full-width windows.
  bool truncated_tail = false;
};

enum class CountMode { window, document };

// Boolean co-occurrence over contexts: a term or pair counts at most once
// per context.
class CooccurrenceCounts {
 public:
  explicit CooccurrenceCounts(CountMode mode) : mode_(mode) {}

  CountMode mode() const { return mode_; }
  std::uint64_t n_contexts() const { return n_contexts_; }
  std::uint64_t single(std::string_view term) const;
  // pair(a, a) is single(a).
  std::uint64_t pair(std::string_view a, std::string_view b) const;
  std::size_t n_terms() const { return singles_.size(); }
  std::size_t n_pairs() const { return pairs_.size(); }

  // Adds one context holding the given tokens (duplicates ignored).
  void add_context(std::span<const std::string> tokens);

 private:
  std::uint32_t intern(const std::string& term);
  std::uint32_t lookup(std::string_view term) const;

  CountMode mode_;
  std::uint64_t n_contexts_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::uint64_t> singles_;
  std::unordered_map<std::uint64_t, std::uint64_t> pairs_;
  std::vector<std::uint32_t> scratch_;
};

CooccurrenceCounts count_windows(std::span<const Document> docs, std::size_t window, bool truncated_tail = false);
CooccurrenceCounts count_documents(std::span<const Document> docs);

// NPMI with the epsilon guard inside both logarithms, raised to gamma
// (sign-preserving for non-integer gamma). A term with no occurrences gives
// the floor value -1; a pair present in every context gives 0.
double npmi(const CooccurrenceCounts& counts, std::string_view w1, std::string_view w2, double epsilon,
            double gamma);

inline constexpr double kNpmiFloor = -1.0;

struct TopicCoherence {
  double score = 0.0;
  std::size_t absent_terms = 0;  // terms with no occurrence in the reference
};

// Mean NPMI over unordered term pairs (window counts). Needs >= 2 terms.
TopicCoherence c_npmi(std::span<const std::string> topic, const CooccurrenceCounts& counts, double epsilon = 1e-12,
                      double gamma = 1.0);

// Entry j is npmi(w, context[j]) over document counts.
std::vector<double> context_vector(std::string_view w, std::span<const std::string> context,
                                   const CooccurrenceCounts& counts, double epsilon = 1e-12, double gamma = 1.0);

// Cosine similarity; 0 when either vector is all zeros.
double cosine(std::span<const double> u, std::span<const double> v);

// Indirect confirmation: mean cosine of context vectors over unordered term
// pairs (pairwise), or of each term against the summed topic vector
// (one_set). Needs >= 2 terms.
TopicCoherence c_v(std::span<const std::string> topic, const CooccurrenceCounts& counts,
                   std::span<const std::string> context, const CoherenceConfig& cfg = {});

// Union of all topics' terms in first-occurrence order.
std::vector<std::string> topic_union(std::span<const std::vector<std::vector<std::string>>> models);

struct ModelCoherence {
  double mean = 0.0;                  // over scored topics
  std::vector<double> per_topic;      // NaN for skipped topics
  std::vector<std::size_t> absent_terms;
  std::vector<std::size_t> skipped;   // topics with fewer than two terms
};

// Holds both count tables for one reference corpus and scores whole models.
class CoherenceEvaluator {
 public:
  CoherenceEvaluator(std::span<const Document> reference, CoherenceConfig cfg);

  const CoherenceConfig& config() const { return cfg_; }
  const CooccurrenceCounts& window_counts() const { return windows_; }
  const CooccurrenceCounts& document_counts() const { return documents_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  // Topics are truncated to cfg.topn terms. For C_V, context is the word set
  // W; when empty it defaults to the union of these topics (topic_union
  // scope) or the reference vocabulary (full_vocabulary scope).
  ModelCoherence score(std::span<const std::vector<std::string>> topics, CoherenceMetric metric,
                       std::span<const std::string> context = {}) const;

 private:
  CoherenceConfig cfg_;
  CooccurrenceCounts windows_;
  CooccurrenceCounts documents_;
  std::vector<std::string> vocabulary_;
};

ModelCoherence model_coherence(std::span<const std::vector<std::string>> topics, CoherenceMetric metric,
                               const CoherenceEvaluator& evaluator, std::span<const std::string> context = {});

}  // namespace stormtopics
