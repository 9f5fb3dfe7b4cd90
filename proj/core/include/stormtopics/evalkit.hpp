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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stormtopics/clustering.hpp"
#include "stormtopics/keywords.hpp"

namespace stormtopics {

// ------------------------------------------------------------ agreement

struct AgreementReport {
  double agr_a_given_b = 0.0;  // Agr_A(B)
  double agr_b_given_a = 0.0;  // Agr_B(A)
  double symmetric = 0.0;      // mean of the two
};

// Agr_A(B): mean over the non-empty clusters A_i of max_j |A_i n B_j| / |A_i|.
double directed_agreement(const Clustering& a, const Clustering& b);

// Throws InputError listing the symmetric difference when the clusterings
// cover different ids.
AgreementReport agreement(const Clustering& a, const Clustering& b);

// ------------------------------------------------------------ samples

enum class EvalTask { keyword, cluster };

std::string_view to_string(EvalTask task);
EvalTask eval_task_from_string(std::string_view name);

inline constexpr std::size_t kMembersPerSample = 4;
inline constexpr std::size_t kSamplesPerTopic = 10;

struct EvalSample {
  std::string sample_id;
  ModelTag model_tag = ModelTag::fte;
  std::size_t topic = 0;
  std::vector<std::string> member_doc_ids;  // kMembersPerSample ids from the topic
  std::string intruder_doc_id;              // one id from outside the topic
  std::vector<std::string> presented_order; // permutation of the five ids

  std::size_t intruder_position() const;

  // Re-checks the 4+1 structure, membership and the permutation.
  void validate(const Clustering& clustering) const;
};

struct SamplingResult {
  std::vector<EvalSample> samples;
  std::vector<std::size_t> skipped_topics;  // fewer than four documents
  std::vector<std::string> warnings;
};

// Members uniform without replacement within the topic, intruder uniform
// over all documents outside it, presentation order uniformly shuffled.
// Throws InputError when the clustering has fewer than five documents.
SamplingResult sample_intruder_sets(const Clustering& clustering, std::size_t sets_per_topic, std::uint64_t seed);

struct KeywordSample {
  std::string sample_id;
  ModelTag model_tag = ModelTag::fte;
  std::size_t topic = 0;
  std::vector<std::string> keywords;  // top kEvaluationKeywords
};

std::vector<KeywordSample> keyword_samples(const KeywordTable& table, std::uint64_t seed);

// Answer keys live apart from the annotator payload.
struct AnswerKey {
  std::string sample_id;
  EvalTask task = EvalTask::cluster;
  ModelTag model_tag = ModelTag::fte;
  std::size_t topic = 0;
  std::optional<std::size_t> intruder_position;  // cluster task only
  std::vector<std::string> member_doc_ids;
  std::string intruder_doc_id;
  std::vector<std::string> presented_order;
};

AnswerKey answer_for(const EvalSample& sample);
AnswerKey answer_for(const KeywordSample& sample);

nlohmann::json to_json(const AnswerKey& answer);
AnswerKey answer_from_json(const nlohmann::json& j);

// Payloads carry only what an annotator sees: sample id, task, and either
// the five tweet texts by position or the keyword list.
nlohmann::json cluster_payload(const EvalSample& sample, const std::map<std::string, std::string>& texts);
nlohmann::json keyword_payload(const KeywordSample& sample);

// ------------------------------------------------------------ annotations

enum class Interpretability { good, neutral, bad };
enum class Usefulness { useful, average, useless };

struct AnnotationRecord {
  std::string sample_id;
  std::string annotator_id;
  EvalTask task = EvalTask::cluster;
  std::optional<std::size_t> intruder_pick;  // cluster task; empty means unsure
  Interpretability interpretability = Interpretability::neutral;
  Usefulness usefulness = Usefulness::average;
};

// Keyword task: {"sample_id","annotator_id","task":"keyword","interpretability",
// "usefulness_keyword": useful|average|useless}.
// Cluster task: {"sample_id","annotator_id","task":"cluster","intruder_pick": 0..4 | "unsure",
// "interpretability","usefulness_cluster": useful|useless}.
// Fields belonging to the other task are rejected.
nlohmann::json to_json(const AnnotationRecord& record);
AnnotationRecord annotation_from_json(const nlohmann::json& j);

// Rescaling to [0, 1]: good/useful 1, neutral/average 0.5, bad/useless 0.
double scale(Interpretability v);
double scale(Usefulness v);

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);
std::vector<AnswerKey> read_answers(const std::filesystem::path& path);

// ------------------------------------------------------------ agreement between raters

// Fleiss' kappa. ratings[i] holds the category index chosen by each rater
// for item i; every item needs the same number r >= 2 of ratings. When the
// chance agreement is 1 the result is 1 if observed agreement is 1 too,
// otherwise InputError.
double fleiss_kappa(std::span<const std::vector<std::size_t>> ratings, std::size_t n_categories);

// ------------------------------------------------------------ aggregation

struct TopicScores {
  ModelTag model = ModelTag::fte;
  std::size_t topic = 0;
  std::size_t n_records = 0;
  double interpretability = 0.0;
  double usefulness = 0.0;
  std::optional<double> correct_intruders;  // cluster task
  std::optional<double> unsure_intruders;   // cluster task
};

struct MetricSummary {
  ModelTag model = ModelTag::fte;
  std::string metric;  // interpretability | usefulness | correct_intruders | unsure_intruders
  double average = 0.0;             // mean over topics
  std::size_t topics_above_half = 0;
  std::optional<double> kappa;      // absent for unsure intruders or uneven rater counts
};

struct EvalSummary {
  EvalTask task = EvalTask::cluster;
  std::vector<TopicScores> topics;      // sorted by model, topic
  std::vector<MetricSummary> metrics;   // sorted by model, metric order
};

// Per topic: mean over its records (annotators x samples). Correct-intruder
// rate counts picks at the true intruder position; 'unsure' is incorrect
// and also counted separately. Model averages are means over topics.
// Throws InputError for records naming unknown samples or the wrong task.
EvalSummary aggregate_scores(std::span<const AnnotationRecord> records, std::span<const AnswerKey> answers,
                             EvalTask task);

// model,topic,keyword_interpretability,keyword_usefulness,cluster_interpretability,
// cluster_usefulness,correct_intruders,unsure_intruders
std::string topic_scores_csv(const EvalSummary* keyword, const EvalSummary* cluster);
// task,metric,model,average_score,topic_count,fleiss_kappa
std::string summary_table_csv(std::span<const EvalSummary> summaries);

}  // namespace stormtopics
