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
#include "stormtopics_cli/stages.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "stormtopics/coherence.hpp"
#include "stormtopics/embedding_io.hpp"
#include "stormtopics/error.hpp"
#include "stormtopics/evalkit.hpp"
#include "stormtopics/io.hpp"
#include "stormtopics/random.hpp"

#ifndef STORMTOPICS_VERSION
#define STORMTOPICS_VERSION "unknown"
#endif

namespace stormtopics::cli {

namespace {

// Input names are recorded relative to their parent directory so that runs
// in different output roots produce identical run.json files.
std::string label(const fs::path& p) {
  const fs::path parent = p.parent_path().filename();
  return parent.empty() ? p.filename().string() : (parent / p.filename()).string();
}

class RunRecord {
 public:
  RunRecord(std::string command, nlohmann::json config) : command_(std::move(command)), config_(std::move(config)) {}

  void input(const fs::path& p) { inputs_.push_back({{"name", label(p)}, {"sha256", sha256_file(p)}}); }

  void input_bundle(const fs::path& dir) {
    for (const char* f : {"manifest.json", "vectors.f32", "attention.jsonl"}) input(dir / f);
  }

  void write(const fs::path& path, std::string_view content) {
    write_file_atomic(path, content);
    recorded(path, sha256_hex(content));
  }

  // For files written by a module's own writer.
  void written(const fs::path& path) { recorded(path, sha256_file(path)); }

  void finish(const fs::path& dir) {
    nlohmann::json j = {{"command", command_},
                        {"version", STORMTOPICS_VERSION},
                        {"config", config_},
                        {"inputs", inputs_},
                        {"outputs", outputs_}};
    write_file_atomic(dir / "run.json", j.dump(2) + "\n");
  }

 private:
  void recorded(const fs::path& path, std::string sha) {
    outputs_.push_back({{"name", path.filename().string()}, {"sha256", std::move(sha)}});
  }

  std::string command_;
  nlohmann::json config_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

std::string suffixed(std::string_view stem, std::size_t k, std::string_view ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-k%02zu", k);
  return std::string(stem) + buf + std::string(ext);
}

ModelTag tag_for(const EmbeddingBundle& b) {
  return b.manifest.source_tag == SourceTag::finetuned ? ModelTag::fte : ModelTag::bert;
}

std::string jsonl(std::span<const nlohmann::json> rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

void truncate(std::vector<TopicKeywords>& topics, std::size_t limit) {
  for (auto& t : topics) {
    if (t.ranked.size() > limit) t.ranked.resize(limit);
  }
}

std::vector<std::string> sorted_matching(const fs::path& dir, std::string_view prefix, std::string_view ext) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with(prefix) && name.ends_with(ext)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TopicKeywords> keywords_for(const GridCell& cell, const Clustering& c, std::span<const Document> docs,
                                        const EmbeddingBundle* bundle, const PipelineConfig& cfg,
                                        const PreprocessConfig& pcfg, StageContext& ctx) {
  TfIdfConfig tf = cfg.keywords.tfidf;
  tf.max_document_frequency = cell.mdf;
  tf.sublinear_tf = cell.sublinear;
  tf.use_phrases = cell.phrases;
  const auto attention = [&] {
    if (bundle == nullptr) throw InputError("the attention strategies need --bundle");
    auto a = attention_scores(c, *bundle, pcfg, AttentionOptions{cfg.keywords.normalize_attention});
    if (a.skipped_docs > 0) {
      ctx.err << "warning: " << a.skipped_docs << " documents have no attention record in the bundle\n";
    }
    return a.topics;
  };
  switch (cell.strategy) {
    case KeywordStrategy::tfidf: return cluster_tfidf(c, docs, tf);
    case KeywordStrategy::attention: return attention();
    case KeywordStrategy::combined: return combined_scores(cluster_tfidf(c, docs, tf), attention());
    case KeywordStrategy::phi: break;
  }
  throw InputError("the phi strategy applies to probabilistic models only");
}

nlohmann::json cell_json(const GridRow& row) {
  return {{"k", row.k},
          {"mdf", row.cell.mdf},
          {"sublinear", row.cell.sublinear},
          {"phrases", row.cell.phrases},
          {"strategy", to_string(row.cell.strategy)},
          {"c_v", row.c_v}};
}

}  // namespace

std::string clustering_file(std::size_t k) { return suffixed("clustering", k, ".json"); }
std::string keywords_file(std::size_t k) { return suffixed("keywords", k, ".json"); }

// ------------------------------------------------------------ preprocess

void run_preprocess(const PreprocessArgs& args, const PipelineConfig& cfg, StageContext& ctx) {
  const TweetFormat format = args.format.value_or(tweet_format_for(args.corpus));
  const auto tweets = load_tweets(args.corpus, format);
  const PreprocessConfig pcfg = cfg.preprocess.resolve();
  const auto docs = tokenize_all(tweets, pcfg);

  ensure_dir(args.out);
  RunRecord run("preprocess", {{"format", format == TweetFormat::csv ? "csv" : "jsonl"},
                               {"preprocess", to_json(cfg.preprocess)}});
  run.input(args.corpus);
  write_documents(args.out / "documents.jsonl", docs);
  run.written(args.out / "documents.jsonl");
  run.finish(args.out);

  const auto empty = std::count_if(docs.begin(), docs.end(), [](const Document& d) { return d.tokens.empty(); });
  ctx.out << "preprocess: " << docs.size() << " documents, " << empty << " without tokens\n";
}

// ------------------------------------------------------------ cluster

void run_cluster(const ClusterArgs& args, const PipelineConfig& cfg, StageContext& ctx) {
  const auto bundle = read_bundle(args.bundle);
  const auto docs = read_documents(args.documents);
  const Alignment al = align(bundle, docs);
  if (!al.missing_from_bundle.empty()) {
    ctx.err << "warning: " << al.missing_from_bundle.size() << " documents have no embedding and are not clustered\n";
  }
  if (!al.missing_from_corpus.empty()) {
    ctx.err << "warning: " << al.missing_from_corpus.size() << " embeddings have no document and are ignored\n";
  }
  Matrix points(al.size(), bundle.vectors.cols());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < al.size(); ++i) {
    std::copy_n(bundle.vectors.row(al.row[i]).begin(), points.cols(), points.row(i).begin());
    ids.push_back(docs[al.doc_index[i]].id);
  }
  const ModelTag tag = args.model_tag.value_or(tag_for(bundle));

  ensure_dir(args.out);
  RunRecord run("cluster", {{"model_tag", to_string(tag)},
                            {"k_sweep", args.ks.str()},
                            {"seed", args.seed},
                            {"kmeans", to_json(cfg.kmeans)}});
  run.input_bundle(args.bundle);
  run.input(args.documents);

  std::string inertia = "model,k,inertia\n";
  for (std::size_t k : args.ks.values()) {
    KMeansConfig kc = cfg.kmeans;
    kc.k = k;
    kc.seed = Rng::derive(args.seed, k);
    const Clustering c = kmeans_cluster(points, ids, kc, tag);
    write_clustering(args.out / clustering_file(k), c);
    run.written(args.out / clustering_file(k));
    inertia += std::string(to_string(tag)) + "," + std::to_string(k) + "," + format_double(c.inertia.value_or(0)) + "\n";
  }
  run.write(args.out / "inertia.csv", inertia);
  run.finish(args.out);
  ctx.out << "cluster: " << to_string(tag) << " over " << points.rows() << " documents, k=" << args.ks.str() << "\n";
}

// ------------------------------------------------------------ topics

void run_topics(const TopicsArgs& args, const PipelineConfig& cfg, StageContext& ctx) {
  if (args.model != ModelTag::lda && args.model != ModelTag::btm) {
    throw InputError("topics --model must be lda or btm");
  }
  const auto docs = read_documents(args.documents);
  const bool lda = args.model == ModelTag::lda;

  ensure_dir(args.out);
  RunRecord run("topics", {{"model", to_string(args.model)},
                           {"k_sweep", args.ks.str()},
                           {"seed", args.seed},
                           {"topn", cfg.keywords.topn},
                           {lda ? "lda" : "btm", lda ? to_json(cfg.lda) : to_json(cfg.btm)}});
  run.input(args.documents);

  for (std::size_t k : args.ks.values()) {
    const std::uint64_t seed = Rng::derive(args.seed, k);
    const fs::path model_path = args.out / suffixed("model", k, ".json");
    Clustering c;
    std::vector<TopicKeywords> kws;
    if (lda) {
      LdaConfig lc = cfg.lda;
      lc.k = k;
      lc.seed = seed;
      const LdaModel m = lda_fit(docs, lc);
      write_lda_model(model_path, m);
      c = lda_cluster(m, docs);
      kws = phi_keywords(m.phi, m.vocabulary, cfg.keywords.topn);
    } else {
      BtmConfig bc = cfg.btm;
      bc.k = k;
      bc.seed = seed;
      const BtmModel m = btm_fit(docs, bc);
      write_btm_model(model_path, m);
      c = btm_cluster(m, docs);
      kws = phi_keywords(m.phi, m.vocabulary, cfg.keywords.topn);
    }
    run.written(model_path);
    if (fs::exists(model_path.string() + ".phi.f32")) run.written(model_path.string() + ".phi.f32");
    if (!c.degenerate.empty()) {
      ctx.err << "warning: k=" << k << ": " << c.degenerate.size()
              << " documents carry no topic evidence and were assigned by the tie rule\n";
    }
    write_clustering(args.out / clustering_file(k), c);
    run.written(args.out / clustering_file(k));
    run.write(args.out / keywords_file(k), keywords_to_json(kws, args.model, k).dump(2) + "\n");
    run.write(args.out / suffixed("keywords", k, ".csv"), keywords_to_csv(kws));
  }
  run.finish(args.out);
  ctx.out << "topics: " << to_string(args.model) << " over " << docs.size() << " documents, k=" << args.ks.str()
          << "\n";
}

// ------------------------------------------------------------ keywords

void run_keywords(const KeywordsArgs& args, const PipelineConfig& cfg, StageContext& ctx) {
  if (args.clusterings.empty()) throw InputError("keywords needs at least one clustering");
  const std::string mode(validate_keyword_mode(cfg.keywords.mode));
  const auto docs = read_documents(args.documents);
  std::optional<EmbeddingBundle> bundle;
  if (args.bundle) bundle = read_bundle(*args.bundle);
  if (mode != "tfidf" && !bundle) throw InputError("keyword strategy " + mode + " needs --bundle");
  const PreprocessConfig pcfg = cfg.preprocess.resolve();

  std::vector<Clustering> clusterings;
  for (const auto& p : args.clusterings) clusterings.push_back(read_clustering(p));

  ensure_dir(args.out);
  nlohmann::json config = {{"strategy", mode},
                           {"keywords", to_json(cfg.keywords)},
                           {"preprocess", to_json(cfg.preprocess)}};
  if (mode == "grid") {
    config["select_k"] = cfg.select_k;
    config["coherence"] = to_json(cfg.coherence);
  }
  RunRecord run("keywords", config);
  for (const auto& p : args.clusterings) run.input(p);
  run.input(args.documents);
  if (args.bundle) run.input_bundle(*args.bundle);

  GridCell cell;
  cell.mdf = cfg.keywords.tfidf.max_document_frequency;
  cell.sublinear = cfg.keywords.tfidf.sublinear_tf;
  cell.phrases = cfg.keywords.tfidf.use_phrases;
  if (mode == "grid") {
    const auto sel = std::find_if(clusterings.begin(), clusterings.end(),
                                  [&](const Clustering& c) { return c.k == cfg.select_k; });
    if (sel == clusterings.end()) {
      throw InputError("grid search needs a clustering with k=" + std::to_string(cfg.select_k));
    }
    GridOptions opts;
    opts.topn = cfg.keywords.topn;
    opts.phrase_config = cfg.keywords.tfidf.phrases;
    opts.attention.normalize_per_tweet = cfg.keywords.normalize_attention;
    const GridResult res = grid_search(*sel, docs, &*bundle, pcfg, cfg.coherence, cfg.select_k, opts);
    run.write(args.out / "grid.csv", grid_to_csv(res.rows));
    run.write(args.out / "best.json", cell_json(res.rows[res.best]).dump(2) + "\n");
    cell = res.rows[res.best].cell;
    ctx.out << "keywords: grid best mdf=" << format_double(cell.mdf) << " sublinear=" << cell.sublinear
            << " phrases=" << cell.phrases << " strategy=" << to_string(cell.strategy)
            << " c_v=" << format_double(res.rows[res.best].c_v) << "\n";
  } else {
    cell.strategy = keyword_strategy_from_string(mode);
  }

  std::set<std::pair<ModelTag, std::size_t>> seen;
  for (const auto& c : clusterings) {
    if (!seen.emplace(c.model_tag, c.k).second) {
      throw InputError("two clusterings share model " + std::string(to_string(c.model_tag)) + " and k=" +
                       std::to_string(c.k));
    }
    auto kws = keywords_for(cell, c, docs, bundle ? &*bundle : nullptr, cfg, pcfg, ctx);
    truncate(kws, cfg.keywords.topn);
    run.write(args.out / keywords_file(c.k), keywords_to_json(kws, c.model_tag, c.k).dump(2) + "\n");
    run.write(args.out / suffixed("keywords", c.k, ".csv"), keywords_to_csv(kws));
  }
  run.finish(args.out);
  ctx.out << "keywords: " << clusterings.size() << " clusterings\n";
}

// ------------------------------------------------------------ coherence

void run_coherence(const CoherenceArgs& args, const PipelineConfig& cfg, StageContext& ctx) {
  if (args.keywords.empty()) throw InputError("coherence needs at least one keyword file");
  std::vector<CoherenceMetric> metrics = args.metrics;
  if (metrics.empty()) metrics.push_back(CoherenceMetric::c_v);
  const auto reference = read_documents(args.reference);

  std::map<std::pair<ModelTag, std::size_t>, KeywordTable> tables;
  for (const auto& p : args.keywords) {
    KeywordTable t = read_keywords(p);
    const auto key = std::make_pair(t.model_tag, t.k);
    if (!tables.emplace(key, std::move(t)).second) {
      throw InputError("two keyword files share model " + std::string(to_string(key.first)) + " and k=" +
                       std::to_string(key.second));
    }
  }
  std::set<ModelTag> models;
  for (const auto& [key, t] : tables) models.insert(key.first);
  if (args.ks) {
    for (ModelTag m : models) {
      for (std::size_t k : args.ks->values()) {
        if (!tables.contains({m, k})) {
          throw InputError("model " + std::string(to_string(m)) + " has no keywords for k=" + std::to_string(k) +
                           " in the sweep " + args.ks->str());
        }
      }
    }
    std::erase_if(tables, [&](const auto& kv) { return kv.first.second < args.ks->lo || kv.first.second > args.ks->hi; });
  }

  const CoherenceEvaluator evaluator(reference, cfg.coherence);
  std::string per_topic = "model,k,metric,topic,score\n";
  std::string curves = "model,k,metric,mean\n";
  for (ModelTag m : models) {
    for (CoherenceMetric metric : metrics) {
      for (const auto& [key, table] : tables) {
        if (key.first != m) continue;
        const auto terms = keyword_terms(table.topics, cfg.coherence.topn);
        const ModelCoherence mc = evaluator.score(terms, metric);
        const std::string prefix =
            std::string(to_string(m)) + "," + std::to_string(key.second) + "," + std::string(to_string(metric)) + ",";
        for (std::size_t t = 0; t < mc.per_topic.size(); ++t) {
          per_topic += prefix + std::to_string(table.topics[t].topic) + "," + format_double(mc.per_topic[t]) + "\n";
        }
        curves += prefix + format_double(mc.mean) + "\n";
      }
    }
  }

  ensure_dir(args.out);
  nlohmann::json metric_names = nlohmann::json::array();
  for (auto metric : metrics) metric_names.push_back(to_string(metric));
  RunRecord run("coherence", {{"metrics", metric_names},
                              {"k_sweep", args.ks ? nlohmann::json(args.ks->str()) : nlohmann::json(nullptr)},
                              {"coherence", to_json(cfg.coherence)}});
  run.input(args.reference);
  for (const auto& p : args.keywords) run.input(p);
  run.write(args.out / "coherence.csv", per_topic);
  run.write(args.out / "curves.csv", curves);
  run.finish(args.out);
  ctx.out << "coherence: " << tables.size() << " keyword tables scored\n";
}

// ------------------------------------------------------------ agree

void run_agree(const AgreeArgs& args, const PipelineConfig&, StageContext& ctx) {
  if (args.clusterings.size() < 2) throw InputError("agree needs at least two clusterings");
  std::vector<Clustering> cs;
  for (const auto& p : args.clusterings) cs.push_back(read_clustering(p));

  std::string csv = "model_a,k_a,model_b,k_b,agr_a_given_b,agr_b_given_a,symmetric\n";
  nlohmann::json single;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const AgreementReport r = agreement(cs[i], cs[j]);
      csv += std::string(to_string(cs[i].model_tag)) + "," + std::to_string(cs[i].k) + "," +
             std::string(to_string(cs[j].model_tag)) + "," + std::to_string(cs[j].k) + "," +
             format_double(r.agr_a_given_b) + "," + format_double(r.agr_b_given_a) + "," +
             format_double(r.symmetric) + "\n";
      single = {{"agr_a_given_b", r.agr_a_given_b}, {"agr_b_given_a", r.agr_b_given_a}, {"symmetric", r.symmetric}};
    }
  }
  if (cs.size() == 2) {
    ctx.out << single.dump(2) << "\n";
  } else {
    ctx.out << csv;
  }
  if (args.out) {
    ensure_dir(*args.out);
    RunRecord run("agree", nlohmann::json::object());
    for (const auto& p : args.clusterings) run.input(p);
    run.write(*args.out / "agreement.csv", csv);
    run.finish(*args.out);
  }
}

// ------------------------------------------------------------ sample-eval

void run_sample_eval(const SampleEvalArgs& args, const PipelineConfig& cfg, StageContext& ctx) {
  if (args.clusterings.empty() && args.keywords.empty()) {
    throw InputError("sample-eval needs clusterings or keyword files");
  }
  std::map<std::string, std::string> texts;
  if (!args.clusterings.empty()) {
    if (!args.corpus) throw InputError("sample-eval needs --corpus to show tweet texts");
    for (auto& t : load_tweets(*args.corpus, args.format.value_or(tweet_format_for(*args.corpus)))) {
      texts.emplace(std::move(t.id), std::move(t.text));
    }
  }

  std::vector<nlohmann::json> cluster_payloads, keyword_payloads;
  std::vector<AnswerKey> answers;
  std::set<std::string> ids;
  const auto claim = [&](const std::string& id) {
    if (!ids.insert(id).second) throw Error("sample id collision on " + id + "; choose another seed");
  };

  for (std::size_t i = 0; i < args.clusterings.size(); ++i) {
    const Clustering c = read_clustering(args.clusterings[i]);
    SamplingResult res = sample_intruder_sets(c, cfg.sets_per_topic, Rng::derive(args.seed, i));
    for (const auto& w : res.warnings) ctx.err << "warning: " << to_string(c.model_tag) << ": " << w << "\n";
    for (const auto& s : res.samples) {
      s.validate(c);
      claim(s.sample_id);
      cluster_payloads.push_back(cluster_payload(s, texts));
      answers.push_back(answer_for(s));
    }
  }
  for (std::size_t i = 0; i < args.keywords.size(); ++i) {
    const KeywordTable t = read_keywords(args.keywords[i]);
    for (const auto& s : keyword_samples(t, Rng::derive(args.seed, (1ULL << 32) + i))) {
      claim(s.sample_id);
      keyword_payloads.push_back(keyword_payload(s));
      answers.push_back(answer_for(s));
    }
  }

  // Interleave models in the payload so queue order reveals nothing.
  Rng rng(Rng::derive(args.seed, 1ULL << 40));
  rng.shuffle(std::span<nlohmann::json>(cluster_payloads));
  rng.shuffle(std::span<nlohmann::json>(keyword_payloads));
  std::sort(answers.begin(), answers.end(),
            [](const AnswerKey& a, const AnswerKey& b) { return a.sample_id < b.sample_id; });
  std::vector<nlohmann::json> answer_rows;
  for (const auto& a : answers) answer_rows.push_back(to_json(a));

  ensure_dir(args.out);
  RunRecord run("sample-eval", {{"seed", args.seed}, {"sets_per_topic", cfg.sets_per_topic}});
  for (const auto& p : args.clusterings) run.input(p);
  for (const auto& p : args.keywords) run.input(p);
  if (args.corpus) run.input(*args.corpus);
  run.write(args.out / "cluster_samples.jsonl", jsonl(cluster_payloads));
  run.write(args.out / "keyword_samples.jsonl", jsonl(keyword_payloads));
  run.write(args.out / "answers.jsonl", jsonl(answer_rows));
  run.finish(args.out);
  ctx.out << "sample-eval: " << cluster_payloads.size() << " cluster samples, " << keyword_payloads.size()
          << " keyword samples\n";
}

// ------------------------------------------------------------ score-eval

void run_score_eval(const ScoreEvalArgs& args, const PipelineConfig&, StageContext& ctx) {
  if (args.annotations.empty()) throw InputError("score-eval needs at least one annotation file");
  std::vector<AnnotationRecord> records;
  for (const auto& p : args.annotations) {
    auto part = read_annotations(p);
    records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const auto answers = read_answers(args.answers);

  std::vector<EvalSummary> summaries;
  const EvalSummary* keyword = nullptr;
  const EvalSummary* cluster = nullptr;
  for (EvalTask task : {EvalTask::keyword, EvalTask::cluster}) {
    EvalSummary s = aggregate_scores(records, answers, task);
    if (!s.topics.empty()) summaries.push_back(std::move(s));
  }
  for (const auto& s : summaries) (s.task == EvalTask::keyword ? keyword : cluster) = &s;

  ensure_dir(args.out);
  RunRecord run("score-eval", nlohmann::json::object());
  for (const auto& p : args.annotations) run.input(p);
  run.input(args.answers);
  run.write(args.out / "topic_scores.csv", topic_scores_csv(keyword, cluster));
  run.write(args.out / "summary.csv", summary_table_csv(summaries));
  run.finish(args.out);
  ctx.out << "score-eval: " << records.size() << " records\n";
}

// ------------------------------------------------------------ report

void run_report(const ReportArgs& args, const PipelineConfig&, StageContext& ctx) {
  if (args.inputs.empty()) throw InputError("report needs at least one input directory");
  ensure_dir(args.out);
  RunRecord run("report", nlohmann::json::object());
  std::set<std::string> names;
  std::string curves_header;
  std::string curves;
  std::size_t copied = 0;
  for (const auto& dir : args.inputs) {
    if (!fs::is_directory(dir)) throw InputError("report input is not a directory: " + dir.string());
    const std::string stage = dir.filename().string();
    for (const auto& name : sorted_matching(dir, "", ".csv")) {
      const std::string content = read_file(dir / name);
      run.input(dir / name);
      const std::string target = stage + "-" + name;
      if (!names.insert(target).second) throw InputError("duplicate report entry " + target);
      run.write(args.out / target, content);
      ++copied;
      if (name == "curves.csv") {
        const auto nl = content.find('\n');
        const std::string header = content.substr(0, nl);
        if (curves_header.empty()) curves_header = header;
        if (header != curves_header) throw InputError("coherence curves in " + dir.string() + " have another layout");
        if (nl != std::string::npos) curves += content.substr(nl + 1);
      }
    }
  }
  if (!curves_header.empty()) run.write(args.out / "coherence_curves.csv", curves_header + "\n" + curves);
  run.finish(args.out);
  ctx.out << "report: " << copied << " tables collated\n";
}

// ------------------------------------------------------------ pipeline

void run_pipeline(const PipelineArgs& args, const PipelineConfig& cfg, StageContext& ctx) {
  if (args.bundles.empty()) throw InputError("pipeline needs at least one --bundle");
  const auto ks = cfg.k_sweep;
  if (cfg.select_k < ks.lo || cfg.select_k > ks.hi) {
    throw InputError("select_k=" + std::to_string(cfg.select_k) + " lies outside the sweep " + ks.str());
  }
  ensure_dir(args.out);
  const fs::path docs = args.out / "preprocess" / "documents.jsonl";
  run_preprocess({args.corpus, args.format, args.out / "preprocess"}, cfg, ctx);

  std::vector<fs::path> stage_dirs{args.out / "preprocess"};
  std::vector<fs::path> keyword_files;
  std::vector<fs::path> selected_clusterings;
  std::vector<fs::path> selected_keywords;
  std::set<ModelTag> embedding_tags;

  for (std::size_t b = 0; b < args.bundles.size(); ++b) {
    const ModelTag tag = tag_for(read_bundle(args.bundles[b]));
    if (!embedding_tags.insert(tag).second) {
      throw InputError("two bundles share the model tag " + std::string(to_string(tag)));
    }
    const std::string name(to_string(tag));
    const fs::path cdir = args.out / ("cluster-" + name);
    const fs::path kdir = args.out / ("keywords-" + name);
    run_cluster({args.bundles[b], docs, tag, ks, Rng::derive(args.seed, 10 + b), cdir}, cfg, ctx);
    KeywordsArgs kargs{{}, docs, args.bundles[b], kdir};
    for (std::size_t k : ks.values()) kargs.clusterings.push_back(cdir / clustering_file(k));
    run_keywords(kargs, cfg, ctx);
    for (std::size_t k : ks.values()) keyword_files.push_back(kdir / keywords_file(k));
    selected_clusterings.push_back(cdir / clustering_file(cfg.select_k));
    selected_keywords.push_back(kdir / keywords_file(cfg.select_k));
    stage_dirs.push_back(cdir);
    stage_dirs.push_back(kdir);
  }

  for (ModelTag m : {ModelTag::lda, ModelTag::btm}) {
    const fs::path tdir = args.out / ("topics-" + std::string(to_string(m)));
    run_topics({m, docs, ks, Rng::derive(args.seed, m == ModelTag::lda ? 1 : 2), tdir}, cfg, ctx);
    for (std::size_t k : ks.values()) keyword_files.push_back(tdir / keywords_file(k));
    selected_clusterings.push_back(tdir / clustering_file(cfg.select_k));
    selected_keywords.push_back(tdir / keywords_file(cfg.select_k));
    stage_dirs.push_back(tdir);
  }

  run_coherence({{CoherenceMetric::c_v, CoherenceMetric::c_npmi}, docs, keyword_files, ks, args.out / "coherence"},
                cfg, ctx);
  run_agree({selected_clusterings, args.out / "agree"}, cfg, ctx);
  stage_dirs.push_back(args.out / "coherence");
  stage_dirs.push_back(args.out / "agree");

  if (!args.skip_eval) {
    run_sample_eval({selected_clusterings, selected_keywords, args.corpus, args.format, Rng::derive(args.seed, 3),
                     args.out / "sample-eval"},
                    cfg, ctx);
  }
  run_report({stage_dirs, args.out / "report"}, cfg, ctx);
}

}  // namespace stormtopics::cli
