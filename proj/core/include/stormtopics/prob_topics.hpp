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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stormtopics/clustering.hpp"
#include "stormtopics/corpus.hpp"
#include "stormtopics/matrix.hpp"
#include "stormtopics/random.hpp"

namespace stormtopics {

// Total Gibbs sweeps are passes * iterations for both samplers.
struct LdaConfig {
  std::size_t k = 9;
  std::optional<double> alpha;  // defaults to 50 / k
  double beta = 0.01;
  std::size_t passes = 10;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;

  double resolved_alpha() const { return alpha.value_or(50.0 / static_cast<double>(k)); }
};

struct LdaModel {
  std::size_t k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t passes = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary;
  std::vector<std::string> doc_ids;
  Matrix phi;    // k x |V|
  Matrix theta;  // n_docs x k
  std::vector<std::uint64_t> topic_counts;  // tokens per topic in the final state

  // Corpus-level topic proportions from the training counts.
  std::vector<double> topic_proportions() const;
};

// Collapsed Gibbs state over token-topic assignments. Exposed so tests can
// inspect the count tables between sweeps.
class LdaSampler {
 public:
  LdaSampler(std::vector<std::vector<std::uint32_t>> docs, std::size_t vocab_size, std::size_t k, double alpha,
             double beta, std::uint64_t seed);

  void sweep();
  LdaModel estimate() const;

  // Every marginal matches the assignments: sum_w n_zw = n_z,
  // sum_z n_dz = |d| and the table totals equal the token count.
  bool counts_consistent() const;
  // Smallest normaliser seen across all conditional draws so far.
  double min_conditional_mass() const { return min_mass_; }
  bool all_conditionals_finite() const { return finite_; }

 private:
  std::vector<std::vector<std::uint32_t>> docs_;
  std::vector<std::vector<std::uint32_t>> z_;
  std::size_t vocab_size_;
  std::size_t k_;
  double alpha_;
  double beta_;
  std::vector<std::uint64_t> n_dz_;
  std::vector<std::uint64_t> n_zw_;
  std::vector<std::uint64_t> n_z_;
  std::vector<double> weights_;
  Rng rng_;
  double min_mass_;
  bool finite_ = true;
};

// Throws InputError when the corpus has no tokens or k == 0.
LdaModel lda_fit(std::span<const Document> docs, const LdaConfig& cfg);

struct Biterm {
  std::uint32_t first;  // first <= second
  std::uint32_t second;

  friend auto operator<=>(const Biterm&, const Biterm&) = default;
};

// For each position i, pairs (w_i, w_j) for i < j < i + window. Unordered,
// duplicates kept. window must be at least 2.
std::vector<std::pair<std::string, std::string>> extract_biterms(const Document& doc, std::size_t window);
std::vector<Biterm> extract_biterms(std::span<const std::uint32_t> ids, std::size_t window);

struct BtmConfig {
  std::size_t k = 9;
  std::optional<double> alpha;  // defaults to 50 / k
  double beta = 0.005;
  std::size_t window = 15;
  std::size_t passes = 10;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;

  double resolved_alpha() const { return alpha.value_or(50.0 / static_cast<double>(k)); }
};

struct BtmModel {
  std::size_t k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t window = 0;
  std::size_t passes = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary;
  Matrix phi;                 // k x |V|
  std::vector<double> tau;    // global topic proportions
  std::size_t n_biterms = 0;
  std::vector<std::uint64_t> topic_counts;  // biterms per topic
};

class BtmSampler {
 public:
  BtmSampler(std::vector<Biterm> biterms, std::size_t vocab_size, std::size_t k, double alpha, double beta,
             std::uint64_t seed);

  void sweep();
  BtmModel estimate() const;

  // sum_w n_zw = 2 n_z for every topic and sum_z n_z = |B|.
  bool counts_consistent() const;
  double min_conditional_mass() const { return min_mass_; }
  bool all_conditionals_finite() const { return finite_; }

 private:
  std::vector<Biterm> biterms_;
  std::vector<std::uint32_t> z_;
  std::size_t vocab_size_;
  std::size_t k_;
  double alpha_;
  double beta_;
  std::vector<std::uint64_t> n_zw_;
  std::vector<std::uint64_t> n_z_;
  std::vector<double> weights_;
  Rng rng_;
  double min_mass_;
  bool finite_ = true;
};

// Throws InputError naming the cause when there is no biterm (every
// document shorter than two tokens).
BtmModel btm_fit(std::span<const Biterm> biterms, std::vector<std::string> vocabulary, const BtmConfig& cfg);
BtmModel btm_fit(std::span<const Document> docs, const BtmConfig& cfg);

struct TopicAssignment {
  std::size_t topic = 0;
  bool degenerate = false;  // no scoring evidence; topic 0 by the tie rule
};

// argmax_z sum over the document's tokens of p(z|w), where
// p(z|w) is proportional to phi[z][w] times the corpus topic proportion.
// Unseen words contribute nothing; ties go to the lowest index.
TopicAssignment lda_assign(const LdaModel& model, const Document& doc);

// argmax_z of the mean over the document's biterms of p(z|b), with
// p(z|b) proportional to tau[z] phi[z][w1] phi[z][w2]. Documents without a
// known biterm fall back to sum_w phi[z][w].
TopicAssignment btm_assign(const BtmModel& model, const Document& doc);

Clustering lda_cluster(const LdaModel& model, std::span<const Document> docs);
Clustering btm_cluster(const BtmModel& model, std::span<const Document> docs);

// m most probable column indices per row, descending; ties by index.
// m is clamped to the column count; m == 0 throws InputError.
std::vector<std::vector<std::size_t>> topic_top_words(const Matrix& phi, std::size_t m);
std::vector<std::vector<std::string>> topic_top_terms(const Matrix& phi, std::span<const std::string> vocabulary,
                                                      std::size_t m);

// JSON models; phi moves to a float32 sidecar "<path>.phi.f32" when the
// vocabulary exceeds sidecar_threshold terms.
inline constexpr std::size_t kPhiSidecarThreshold = 4096;

void write_lda_model(const std::filesystem::path& path, const LdaModel& model,
                     std::size_t sidecar_threshold = kPhiSidecarThreshold);
LdaModel read_lda_model(const std::filesystem::path& path);
void write_btm_model(const std::filesystem::path& path, const BtmModel& model,
                     std::size_t sidecar_threshold = kPhiSidecarThreshold);
BtmModel read_btm_model(const std::filesystem::path& path);

}  // namespace stormtopics
