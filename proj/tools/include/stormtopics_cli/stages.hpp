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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stormtopics_cli/config.hpp"

namespace stormtopics::cli {

namespace fs = std::filesystem;

struct StageContext {
  std::ostream& out;  // results and progress
  std::ostream& err;  // warnings
};

struct PreprocessArgs {
  fs::path corpus;
  std::optional<TweetFormat> format;
  fs::path out;
};
void run_preprocess(const PreprocessArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct ClusterArgs {
  fs::path bundle;
  fs::path documents;
  std::optional<ModelTag> model_tag;  // defaults from the bundle's source tag
  KRange ks;
  std::uint64_t seed = 0;
  fs::path out;
};
void run_cluster(const ClusterArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct TopicsArgs {
  ModelTag model = ModelTag::lda;
  fs::path documents;
  KRange ks;
  std::uint64_t seed = 0;
  fs::path out;
};
void run_topics(const TopicsArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct KeywordsArgs {
  std::vector<fs::path> clusterings;
  fs::path documents;
  std::optional<fs::path> bundle;
  fs::path out;
};
void run_keywords(const KeywordsArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct CoherenceArgs {
  std::vector<CoherenceMetric> metrics;
  fs::path reference;
  std::vector<fs::path> keywords;
  std::optional<KRange> ks;  // every model must then cover every k
  fs::path out;
};
void run_coherence(const CoherenceArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct AgreeArgs {
  std::vector<fs::path> clusterings;  // two or more
  std::optional<fs::path> out;
};
void run_agree(const AgreeArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct SampleEvalArgs {
  std::vector<fs::path> clusterings;
  std::vector<fs::path> keywords;
  std::optional<fs::path> corpus;
  std::optional<TweetFormat> format;
  std::uint64_t seed = 0;
  fs::path out;
};
void run_sample_eval(const SampleEvalArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct ScoreEvalArgs {
  std::vector<fs::path> annotations;
  fs::path answers;
  fs::path out;
};
void run_score_eval(const ScoreEvalArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct ReportArgs {
  std::vector<fs::path> inputs;
  fs::path out;
};
void run_report(const ReportArgs& args, const PipelineConfig& cfg, StageContext& ctx);

struct PipelineArgs {
  fs::path corpus;
  std::optional<TweetFormat> format;
  std::vector<fs::path> bundles;
  std::uint64_t seed = 0;
  bool skip_eval = false;
  fs::path out;
};
void run_pipeline(const PipelineArgs& args, const PipelineConfig& cfg, StageContext& ctx);

// File names used between stages.
std::string clustering_file(std::size_t k);
std::string keywords_file(std::size_t k);

}  // namespace stormtopics::cli
