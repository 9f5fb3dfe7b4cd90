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
#include "stormtopics_cli/cli.hpp"

#include <CLI11.hpp>
#include <functional>
#include <optional>

#include "stormtopics/error.hpp"
#include "stormtopics_cli/stages.hpp"

namespace stormtopics::cli {

namespace {

template <typename T>
void override_with(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

TweetFormat format_from_string(const std::string& s) {
  if (s == "jsonl") return TweetFormat::jsonl;
  if (s == "csv") return TweetFormat::csv;
  throw InputError("unknown corpus format \"" + s + "\"");
}

std::optional<TweetFormat> format_opt(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return format_from_string(*s);
}

KRange pick_range(const std::optional<std::size_t>& k, const std::optional<std::string>& sweep, const KRange& fallback) {
  if (k && sweep) throw InputError("--k and --k-sweep are mutually exclusive");
  if (k) return parse_k_range(std::to_string(*k));
  if (sweep) return parse_k_range(*sweep);
  return fallback;
}

struct PreprocessFlags {
  std::optional<std::string> hashtag_policy, mention_policy, stopwords;
  std::optional<std::size_t> min_token_len;

  void add(CLI::App* app) {
    app->add_option("--hashtag-policy", hashtag_policy, "strip-symbol-keep-body | drop-token");
    app->add_option("--mention-policy", mention_policy, "strip-symbol-keep-body | drop-token");
    app->add_option("--stopwords", stopwords, "bundled list id (en-v1) or a word-list file");
    app->add_option("--min-token-len", min_token_len, "minimum token length in codepoints");
  }
  void apply(PipelineConfig& c) const {
    if (hashtag_policy) c.preprocess.hashtag_policy = token_policy_from_string(*hashtag_policy);
    if (mention_policy) c.preprocess.mention_policy = token_policy_from_string(*mention_policy);
    override_with(stopwords, c.preprocess.stopwords);
    override_with(min_token_len, c.preprocess.min_token_len);
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic modelling and evaluation for crisis tweets", "stormtopics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", STORMTOPICS_VERSION);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON configuration file; flags take precedence");
  app.add_option("--seed", seed, "random seed (falls back to the config, then STORMTOPICS_SEED)");

  std::function<void(const PipelineConfig&, StageContext&)> action;
  PipelineConfig cfg;
  const auto resolved = [&] {
    cfg = config_path ? load_config(*config_path) : PipelineConfig{};
    return resolve_seed(seed, cfg);
  };

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "tokenize a tweet corpus into documents");
  PreprocessArgs pre_args;
  std::optional<std::string> pre_format;
  PreprocessFlags pre_flags;
  pre->add_option("--corpus", pre_args.corpus, "tweets as JSONL or CSV")->required();
  pre->add_option("--format", pre_format, "jsonl | csv (default from the extension)");
  pre->add_option("--out", pre_args.out, "output directory")->required();
  pre_flags.add(pre);
  pre->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      PipelineConfig local = c;
      pre_flags.apply(local);
      pre_args.format = format_opt(pre_format);
      run_preprocess(pre_args, local, ctx);
    };
  });

  // cluster
  auto* clu = app.add_subcommand("cluster", "k-means over embedding bundle vectors");
  ClusterArgs clu_args;
  std::optional<std::string> clu_tag, clu_sweep, clu_algorithm;
  std::optional<std::size_t> clu_k, clu_n_init, clu_max_iter;
  std::optional<double> clu_tol;
  bool clu_normalize = false;
  clu->add_option("--bundle", clu_args.bundle, "embedding bundle directory")->required();
  clu->add_option("--documents", clu_args.documents, "documents.jsonl from preprocess")->required();
  clu->add_option("--model-tag", clu_tag, "fte | bert (default from the bundle)");
  clu->add_option("--k", clu_k, "number of clusters");
  clu->add_option("--k-sweep", clu_sweep, "range of cluster counts, e.g. 5..15");
  clu->add_option("--n-init", clu_n_init, "k-means++ restarts");
  clu->add_option("--max-iter", clu_max_iter, "iterations per restart");
  clu->add_option("--tol", clu_tol, "relative centroid-shift tolerance");
  clu->add_option("--algorithm", clu_algorithm, "elkan | lloyd");
  clu->add_flag("--normalize", clu_normalize, "L2-normalize vectors first");
  clu->add_option("--out", clu_args.out, "output directory")->required();
  clu->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      PipelineConfig local = c;
      override_with(clu_n_init, local.kmeans.n_init);
      override_with(clu_max_iter, local.kmeans.max_iter);
      override_with(clu_tol, local.kmeans.tol);
      if (clu_normalize) local.kmeans.normalize = true;
      if (clu_algorithm) {
        if (*clu_algorithm != "elkan" && *clu_algorithm != "lloyd") {
          throw InputError("unknown k-means algorithm \"" + *clu_algorithm + "\"");
        }
        local.kmeans.algorithm = *clu_algorithm == "elkan" ? KMeansAlgorithm::elkan : KMeansAlgorithm::lloyd;
      }
      if (clu_tag) {
        clu_args.model_tag = model_tag_from_string(*clu_tag);
        if (*clu_args.model_tag != ModelTag::fte && *clu_args.model_tag != ModelTag::bert) {
          throw InputError("cluster --model-tag must be fte or bert");
        }
      }
      clu_args.ks = pick_range(clu_k, clu_sweep, local.k_sweep);
      run_cluster(clu_args, local, ctx);
    };
  });

  // topics
  auto* top = app.add_subcommand("topics", "train LDA or BTM and assign documents");
  TopicsArgs top_args;
  std::string top_model;
  std::optional<std::string> top_sweep;
  std::optional<std::size_t> top_k, top_passes, top_iterations, top_window, top_topn;
  std::optional<double> top_alpha, top_beta;
  top->add_option("--model", top_model, "lda | btm")->required();
  top->add_option("--documents", top_args.documents, "documents.jsonl from preprocess")->required();
  top->add_option("--k", top_k, "number of topics");
  top->add_option("--k-sweep", top_sweep, "range of topic counts, e.g. 5..15");
  top->add_option("--alpha", top_alpha, "document/corpus topic prior (default 50/k)");
  top->add_option("--beta", top_beta, "topic-word prior");
  top->add_option("--passes", top_passes, "outer passes");
  top->add_option("--iterations", top_iterations, "Gibbs sweeps per pass");
  top->add_option("--window", top_window, "BTM biterm window");
  top->add_option("--topn", top_topn, "keywords kept per topic");
  top->add_option("--out", top_args.out, "output directory")->required();
  top->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      PipelineConfig local = c;
      top_args.model = model_tag_from_string(top_model);
      for (auto* lc : {&local.lda.alpha, &local.btm.alpha}) {
        if (top_alpha) *lc = *top_alpha;
      }
      override_with(top_beta, top_args.model == ModelTag::lda ? local.lda.beta : local.btm.beta);
      override_with(top_passes, top_args.model == ModelTag::lda ? local.lda.passes : local.btm.passes);
      override_with(top_iterations, top_args.model == ModelTag::lda ? local.lda.iterations : local.btm.iterations);
      override_with(top_window, local.btm.window);
      override_with(top_topn, local.keywords.topn);
      top_args.ks = pick_range(top_k, top_sweep, local.k_sweep);
      run_topics(top_args, local, ctx);
    };
  });

  // keywords
  auto* kw = app.add_subcommand("keywords", "rank topic keywords for embedding clusterings");
  KeywordsArgs kw_args;
  std::optional<std::string> kw_strategy, kw_bundle;
  std::optional<double> kw_mdf;
  std::optional<bool> kw_sublinear, kw_phrases, kw_normalize;
  std::optional<std::size_t> kw_topn, kw_select_k;
  PreprocessFlags kw_pre;
  kw->add_option("--strategy", kw_strategy, "tfidf | attention | combined | grid");
  kw->add_option("--clustering", kw_args.clusterings, "clustering JSON files")->required();
  kw->add_option("--documents", kw_args.documents, "documents.jsonl from preprocess")->required();
  kw->add_option("--bundle", kw_bundle, "embedding bundle (attention strategies and grid)");
  kw->add_option("--mdf", kw_mdf, "maximum cluster-document frequency in (0, 1]");
  kw->add_flag("--sublinear,!--no-sublinear", kw_sublinear, "sublinear term frequency");
  kw->add_flag("--phrases,!--no-phrases", kw_phrases, "detect phrases before counting");
  kw->add_flag("--normalize-attention,!--raw-attention", kw_normalize, "normalize attention per tweet");
  kw->add_option("--topn", kw_topn, "keywords kept per topic");
  kw->add_option("--select-k", kw_select_k, "cluster count used for grid selection");
  kw->add_option("--out", kw_args.out, "output directory")->required();
  kw_pre.add(kw);
  kw->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      PipelineConfig local = c;
      if (kw_strategy) local.keywords.mode = validate_keyword_mode(*kw_strategy);
      override_with(kw_mdf, local.keywords.tfidf.max_document_frequency);
      override_with(kw_sublinear, local.keywords.tfidf.sublinear_tf);
      override_with(kw_phrases, local.keywords.tfidf.use_phrases);
      override_with(kw_normalize, local.keywords.normalize_attention);
      override_with(kw_topn, local.keywords.topn);
      override_with(kw_select_k, local.select_k);
      kw_pre.apply(local);
      if (kw_bundle) kw_args.bundle = *kw_bundle;
      run_keywords(kw_args, local, ctx);
    };
  });

  // coherence
  auto* coh = app.add_subcommand("coherence", "score keyword tables with C_V and C_NPMI");
  CoherenceArgs coh_args;
  std::vector<std::string> coh_metrics;
  std::optional<std::string> coh_sweep;
  std::optional<std::size_t> coh_window, coh_topn;
  coh->add_option("--metric", coh_metrics, "cv | cnpmi (repeatable)");
  coh->add_option("--reference", coh_args.reference, "reference documents.jsonl")->required();
  coh->add_option("--keywords", coh_args.keywords, "keyword JSON files")->required();
  coh->add_option("--k-sweep", coh_sweep, "require every model to cover this range");
  coh->add_option("--window", coh_window, "sliding window for C_NPMI");
  coh->add_option("--topn", coh_topn, "terms per topic");
  coh->add_option("--out", coh_args.out, "output directory")->required();
  coh->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      PipelineConfig local = c;
      override_with(coh_window, local.coherence.window);
      override_with(coh_topn, local.coherence.topn);
      for (const auto& m : coh_metrics) coh_args.metrics.push_back(coherence_metric_from_string(m));
      if (coh_sweep) coh_args.ks = parse_k_range(*coh_sweep);
      run_coherence(coh_args, local, ctx);
    };
  });

  // agree
  auto* agr = app.add_subcommand("agree", "agreement between clusterings of the same documents");
  AgreeArgs agr_args;
  std::optional<std::string> agr_out;
  agr->add_option("clusterings", agr_args.clusterings, "clustering JSON files")->required()->expected(2, -1);
  agr->add_option("--out", agr_out, "also write agreement.csv here");
  agr->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      if (agr_out) agr_args.out = *agr_out;
      run_agree(agr_args, c, ctx);
    };
  });

  // sample-eval
  auto* se = app.add_subcommand("sample-eval", "draw anonymized human-evaluation samples");
  SampleEvalArgs se_args;
  std::optional<std::string> se_corpus, se_format;
  std::optional<std::size_t> se_sets;
  se->add_option("--clustering", se_args.clusterings, "clusterings for the intruder task");
  se->add_option("--keywords", se_args.keywords, "keyword files for the keyword task");
  se->add_option("--corpus", se_corpus, "tweets supplying the displayed texts");
  se->add_option("--format", se_format, "jsonl | csv");
  se->add_option("--sets-per-topic", se_sets, "intruder sets per topic");
  se->add_option("--out", se_args.out, "output directory")->required();
  se->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      PipelineConfig local = c;
      override_with(se_sets, local.sets_per_topic);
      if (se_corpus) se_args.corpus = *se_corpus;
      se_args.format = format_opt(se_format);
      se_args.seed = resolve_seed(seed, local);
      run_sample_eval(se_args, local, ctx);
    };
  });

  // score-eval
  auto* sc = app.add_subcommand("score-eval", "aggregate annotation records");
  ScoreEvalArgs sc_args;
  sc->add_option("--annotations", sc_args.annotations, "annotation JSONL files")->required();
  sc->add_option("--answers", sc_args.answers, "answers.jsonl from sample-eval")->required();
  sc->add_option("--out", sc_args.out, "output directory")->required();
  sc->callback([&] { action = [&](const PipelineConfig& c, StageContext& ctx) { run_score_eval(sc_args, c, ctx); }; });

  // report
  auto* rep = app.add_subcommand("report", "collate stage tables and coherence curves");
  ReportArgs rep_args;
  rep->add_option("--input", rep_args.inputs, "stage output directories")->required();
  rep->add_option("--out", rep_args.out, "output directory")->required();
  rep->callback([&] { action = [&](const PipelineConfig& c, StageContext& ctx) { run_report(rep_args, c, ctx); }; });

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "run every stage end to end");
  PipelineArgs pipe_args;
  std::optional<std::string> pipe_format, pipe_sweep;
  std::optional<std::size_t> pipe_select_k;
  pipe->add_option("--corpus", pipe_args.corpus, "tweets as JSONL or CSV")->required();
  pipe->add_option("--format", pipe_format, "jsonl | csv");
  pipe->add_option("--bundle", pipe_args.bundles, "embedding bundles (one per embedding model)")->required();
  pipe->add_option("--k-sweep", pipe_sweep, "range of topic counts");
  pipe->add_option("--select-k", pipe_select_k, "topic count for grid search, agreement and samples");
  pipe->add_flag("--skip-eval", pipe_args.skip_eval, "do not draw evaluation samples");
  pipe->add_option("--out", pipe_args.out, "output root")->required();
  pipe->callback([&] {
    action = [&](const PipelineConfig& c, StageContext& ctx) {
      PipelineConfig local = c;
      if (pipe_sweep) local.k_sweep = parse_k_range(*pipe_sweep);
      override_with(pipe_select_k, local.select_k);
      pipe_args.format = format_opt(pipe_format);
      pipe_args.seed = resolve_seed(seed, local);
      run_pipeline(pipe_args, local, ctx);
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  StageContext ctx{out, err};
  try {
    const std::uint64_t s = resolved();
    clu_args.seed = s;
    top_args.seed = s;
    action(cfg, ctx);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace stormtopics::cli
