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
// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "stormtopics/coherence.hpp"
#include "stormtopics/evalkit.hpp"
#include "stormtopics/io.hpp"
#include "stormtopics/keywords.hpp"
#include "stormtopics/kmeans.hpp"
#include "stormtopics/prob_topics.hpp"
#include "stormtopics_cli/cli.hpp"
#include "temp_dir.hpp"

using namespace stormtopics;
namespace fs = std::filesystem;

namespace {

// Collects the first few broken conditions of one criterion.
class Gate {
 public:
  void require(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 5) notes_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (failures_ > 0) {
      s << ", " << failures_ << " failed:";
      for (const auto& n : notes_) s << " [" << n << "]";
    }
    return s.str();
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

Matrix normal_points(std::size_t n, std::size_t dim, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, sigma);
  Matrix m(n, dim);
  for (auto& v : m.values()) v = normal(rng);
  return m;
}

Document make_doc(std::string id, std::vector<std::string> tokens) {
  Document d;
  d.id = std::move(id);
  d.tokens = std::move(tokens);
  return d;
}

Clustering make_clustering(std::vector<std::size_t> labels, std::size_t k) {
  Clustering c;
  c.k = k;
  for (std::size_t i = 0; i < labels.size(); ++i) c.ids.push_back("d" + std::to_string(1000 + i));
  c.labels = std::move(labels);
  return c;
}

bool bijective(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::size_t, std::size_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.emplace(a[i], b[i]).first->second != b[i]) return false;
    if (ba.emplace(b[i], a[i]).first->second != a[i]) return false;
  }
  return true;
}

// Top-m word sets of both topics each come from one planted vocabulary,
// and the two topics cover both vocabularies.
void check_planted_top_words(Gate& g, const Matrix& phi, const std::vector<std::string>& vocab, std::size_t m) {
  std::set<char> seen;
  const auto terms = topic_top_terms(phi, vocab, m);
  for (const auto& topic : terms) {
    const char c = topic.front()[0];
    g.require(topic.size() == m, "top word count");
    g.require(std::all_of(topic.begin(), topic.end(), [c](const std::string& w) { return w[0] == c; }),
              "mixed top words");
    seen.insert(c);
  }
  g.require(seen.size() == 2, "topics do not cover both vocabularies");
}

// ---------------------------------------------------------------- criteria

void kmeans_criterion(Gate& g) {
  std::mt19937_64 gen(20260101);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 20 + gen() % 181;
    const std::size_t dim = 1 + gen() % 8;
    const std::size_t k = 2 + gen() % 7;
    const Matrix pts = normal_points(n, dim, gen);
    Rng rng(gen());
    const Matrix init = kmeans_pp_init(pts, k, rng).centroids;
    const auto elkan = kmeans_run(pts, init, 300, 0.0, KMeansAlgorithm::elkan);
    const auto lloyd = kmeans_run(pts, init, 300, 0.0, KMeansAlgorithm::lloyd);
    const auto ref = oracle::lloyd(oracle::to_rows(pts), oracle::to_rows(init), 300, 0.0);
    const std::string tag = "instance " + std::to_string(inst);
    g.require(elkan.labels == lloyd.labels, tag + " labels");
    g.require(std::abs(elkan.inertia - lloyd.inertia) <= 1e-9, tag + " inertia " + num(elkan.inertia - lloyd.inertia));
    g.require(lloyd.labels == ref.labels, tag + " reference labels");
    g.require(std::abs(lloyd.inertia - ref.inertia) <= 1e-9, tag + " reference inertia");
  }
  std::normal_distribution<double> noise(0.0, 0.1);
  const double centers[4][2] = {{0, 0}, {10, 0}, {0, 10}, {10, 10}};
  Matrix blobs(200, 2);
  std::vector<std::size_t> truth;
  for (std::size_t i = 0; i < 200; ++i) {
    blobs(i, 0) = centers[i % 4][0] + noise(gen);
    blobs(i, 1) = centers[i % 4][1] + noise(gen);
    truth.push_back(i % 4);
  }
  KMeansConfig cfg;
  cfg.k = 4;
  cfg.seed = 4;
  g.require(bijective(kmeans_fit(blobs, cfg).labels, truth), "blob recovery");
}

void lda_criterion(Gate& g) {
  const auto planted = oracle::planted_corpus(200, 20, 77);
  LdaConfig cfg;  // 10 passes x 100 iterations
  cfg.k = 2;
  cfg.seed = 1;
  const auto m = lda_fit(planted.docs, cfg);
  g.require(cfg.passes == 10 && cfg.iterations == 100, "sampling schedule");
  check_planted_top_words(g, m.phi, m.vocabulary, 5);
  std::vector<std::size_t> labels;
  for (std::size_t d = 0; d < m.theta.rows(); ++d) {
    const auto row = m.theta.row(d);
    labels.push_back(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  const double purity = oracle::purity(labels, planted.truth);
  g.require(purity >= 0.95, "theta purity " + num(purity));
}

void btm_criterion(Gate& g) {
  std::mt19937_64 rng(78);
  for (std::size_t window : {2, 5, 15}) {
    for (std::size_t n = 0; n <= 10; ++n) {
      for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::string> tokens(n);
        for (auto& t : tokens) t = std::string(1, static_cast<char>('a' + rng() % 5));
        std::map<std::pair<std::string, std::string>, std::size_t> got;
        for (auto [x, y] : extract_biterms(make_doc("d", tokens), window)) ++got[std::minmax(x, y)];
        g.require(got == oracle::biterm_counts(tokens, window),
                  "window " + std::to_string(window) + " n " + std::to_string(n));
      }
    }
  }
  const auto planted = oracle::planted_corpus(200, 12, 79);
  BtmConfig cfg;
  cfg.k = 2;
  cfg.seed = 2;
  const auto m = btm_fit(planted.docs, cfg);
  check_planted_top_words(g, m.phi, m.vocabulary, 5);
  const double purity = oracle::purity(btm_cluster(m, planted.docs).labels, planted.truth);
  g.require(purity >= 0.95, "assignment purity " + num(purity));
}

CooccurrenceCounts configured(std::size_t n, std::size_t c1, std::size_t c2, std::size_t c12) {
  CooccurrenceCounts counts(CountMode::window);
  const std::vector<std::string> ab{"a", "b"}, a{"a"}, b{"b"}, z{"z"};
  for (std::size_t i = 0; i < c12; ++i) counts.add_context(ab);
  for (std::size_t i = c12; i < c1; ++i) counts.add_context(a);
  for (std::size_t i = c12; i < c2; ++i) counts.add_context(b);
  for (std::size_t i = c1 + c2 - c12; i < n; ++i) counts.add_context(z);
  return counts;
}

void coherence_criterion(Gate& g) {
  std::mt19937_64 rng(80);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    const std::size_t c1 = 1 + rng() % n, c2 = 1 + rng() % n;
    const std::size_t lo = c1 + c2 > n ? c1 + c2 - n : 0;
    const std::size_t c12 = lo + rng() % (std::min(c1, c2) - lo + 1);
    const double v = npmi(configured(n, c1, c2, c12), "a", "b", 1e-12, 1.0);
    g.require(v >= -1.0 - 1e-6 && v <= 1.0 + 1e-6, "npmi out of range " + num(v));
  }
  const double one = npmi(configured(10, 5, 5, 5), "a", "b", 1e-12, 1.0);
  g.require(std::abs(one - 1.0) <= 1e-6, "always co-occurring " + num(one));
  // The smoothed floor sits -ln(p1 p2) / -ln(eps) above -1.
  for (auto [n, c1, c2] : {std::tuple{10, 3, 4}, std::tuple{4, 2, 2}, std::tuple{1000, 400, 500}}) {
    const double v = npmi(configured(n, c1, c2, 0), "a", "b", 1e-12, 1.0);
    const double gap = -std::log((double(c1) / n) * (double(c2) / n)) / -std::log(1e-12);
    g.require(v >= -1.0 && std::abs(v + 1.0 - gap) <= 1e-9, "never co-occurring " + num(v));
  }

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Document> docs;
    std::size_t longest = 0;
    for (int d = 0; d < 30; ++d) {
      std::vector<std::string> t(rng() % 13);
      for (auto& w : t) w = "w" + std::to_string(rng() % 10);
      longest = std::max(longest, t.size());
      docs.push_back(make_doc("x" + std::to_string(d), t));
    }
    const auto w = count_windows(docs, std::max<std::size_t>(longest, 2));
    const auto d = count_documents(docs);
    bool same = w.n_contexts() == d.n_contexts();
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const std::string a = "w" + std::to_string(i), b = "w" + std::to_string(j);
        same = same && w.pair(a, b) == d.pair(a, b) && npmi(w, a, b, 1e-12, 1.0) == npmi(d, a, b, 1e-12, 1.0);
      }
    }
    g.require(same, "window and document counts differ");
  }

  int wins = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 r(5000 + trial);
    std::vector<Document> docs;
    const std::vector<std::string> planted{"p0", "p1", "p2", "p3", "p4"};
    for (int d = 0; d < 80; ++d) {
      std::vector<std::string> t;
      if (d % 4 == 0) t = planted;
      const std::size_t len = 3 + r() % 6;
      for (std::size_t i = 0; i < len; ++i) t.push_back("r" + std::to_string(r() % 40));
      docs.push_back(make_doc("c" + std::to_string(d), t));
    }
    std::vector<std::string> random;
    while (random.size() < 5) {
      const std::string w = "r" + std::to_string(r() % 40);
      if (std::find(random.begin(), random.end(), w) == random.end()) random.push_back(w);
    }
    const std::vector<std::vector<std::string>> model{planted, random};
    const auto s = CoherenceEvaluator(docs, {}).score(model, CoherenceMetric::c_v);
    wins += s.per_topic[0] > s.per_topic[1];
  }
  g.require(wins >= 95, "C_V ranking wins " + std::to_string(wins) + "/100");
}

void tfidf_criterion(Gate& g) {
  const std::vector<Document> docs{make_doc("1", {"snow", "snow"}), make_doc("2", {"road"}),
                                   make_doc("3", {"snow", "power"})};
  auto c2 = make_clustering({0, 0, 1}, 2);
  c2.ids = {"1", "2", "3"};
  const auto kw = cluster_tfidf(c2, docs, {});
  g.require(std::abs(kw[0].score_of("snow") - 2.0) <= 1e-12, "score_A(snow)");
  g.require(std::abs(kw[0].score_of("road") - (std::log(1.5) + 1.0)) <= 1e-12, "score_A(road)");
  g.require(kw[0].ranked.front().term == "snow", "top term at mdf 1.0");
  TfIdfConfig low;
  low.max_document_frequency = 0.6;
  g.require(cluster_tfidf(c2, docs, low)[0].ranked.front().term == "road", "top term at mdf 0.6");

  // Fixture clustering over the whole grid.
  const PreprocessConfig pre;
  const auto corpus = tokenize_all(load_tweets(testing::fixture("tweets.jsonl"), TweetFormat::jsonl), pre);
  const auto bundle = read_bundle(testing::fixture("bundle_fte"));
  KMeansConfig kc;
  kc.k = 9;
  kc.seed = 9;
  const auto clustering = kmeans_cluster(bundle.vectors, bundle.manifest.tweet_ids, kc, ModelTag::fte);
  for (bool sub : {false, true}) {
    for (bool phrases : {false, true}) {
      std::set<std::pair<std::size_t, std::string>> previous;
      bool first = true;
      for (double mdf : {1.0, 0.9, 0.8, 0.7, 0.6}) {
        TfIdfConfig cfg;
        cfg.max_document_frequency = mdf;
        cfg.sublinear_tf = sub;
        cfg.use_phrases = phrases;
        std::set<std::pair<std::size_t, std::string>> kept;
        for (const auto& t : cluster_tfidf(clustering, corpus, cfg)) {
          for (const auto& st : t.ranked) kept.insert({t.topic, st.term});
        }
        if (!first) {
          g.require(std::includes(previous.begin(), previous.end(), kept.begin(), kept.end()),
                    "mdf " + num(mdf) + " added terms");
        }
        previous = kept;
        first = false;
      }
    }
  }
  const auto grid = grid_search(clustering, corpus, &bundle, pre, {}, 9);
  g.require(grid.rows.size() == 60, "grid rows " + std::to_string(grid.rows.size()));
}

void agreement_criterion(Gate& g) {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 200, k = 1 + rng() % 15;
    std::vector<std::size_t> la(n), lb(n);
    for (auto& l : la) l = rng() % k;
    for (auto& l : lb) l = rng() % k;
    const auto a = make_clustering(la, k), b = make_clustering(lb, k);
    const auto self = agreement(a, a);
    g.require(self.symmetric == 1.0 && self.agr_a_given_b == 1.0 && self.agr_b_given_a == 1.0, "Agr(A,A) != 1");
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabeled = b;
    for (auto& l : relabeled.labels) l = perm[l];
    const auto r = agreement(a, b), p = agreement(a, relabeled);
    g.require(std::abs(r.agr_a_given_b - p.agr_a_given_b) <= 1e-12 && std::abs(r.agr_b_given_a - p.agr_b_given_a) <= 1e-12,
              "relabel changed the report");
    const double ref = oracle::directed_agreement(oracle::id_sets(a), oracle::id_sets(b));
    g.require(std::abs(r.agr_a_given_b - ref) <= 1e-12, "reference mismatch");
  }
  const auto hand = agreement(make_clustering({0, 0, 1, 1}, 2), make_clustering({0, 1, 0, 1}, 2));
  g.require(hand.agr_a_given_b == 0.5 && hand.symmetric == 0.5, "4-document example " + num(hand.symmetric));
}

void kappa_criterion(Gate& g) {
  const std::vector<std::vector<std::size_t>> unanimous{{0, 0, 0}, {2, 2, 2}, {1, 1, 1}, {0, 0, 0}};
  g.require(fleiss_kappa(unanimous, 3) == 1.0, "unanimous " + num(fleiss_kappa(unanimous, 3)));
  std::mt19937_64 rng(82);
  std::vector<std::vector<std::size_t>> uniform(1000, std::vector<std::size_t>(4));
  for (auto& item : uniform) {
    for (auto& v : item) v = rng() % 3;
  }
  const double k0 = fleiss_kappa(uniform, 3);
  g.require(std::abs(k0) <= 0.05, "independent uniform " + num(k0));
  const std::vector<std::vector<std::size_t>> small{{0, 0}, {0, 1}};
  g.require(std::abs(fleiss_kappa(small, 2) + 1.0 / 3.0) <= 1e-12, "two-item example");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cats = 2 + rng() % 4, raters = 2 + rng() % 4;
    std::vector<std::vector<std::size_t>> r(2 + rng() % 8, std::vector<std::size_t>(raters));
    for (auto& item : r) {
      for (auto& v : item) v = rng() % cats;
    }
    double direct = 0;
    try {
      direct = oracle::fleiss_kappa(r, cats);
    } catch (...) {
      continue;
    }
    if (!std::isfinite(direct)) continue;  // one category used throughout
    g.require(std::abs(fleiss_kappa(r, cats) - direct) <= 1e-10, "direct formula");
  }
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return out;
}

int run_cli(std::vector<std::string> args, std::string& err) {
  args.insert(args.begin(), "stormtopics");
  std::ostringstream out, es;
  const int code = cli::run_cli(args, out, es);
  err = es.str();
  return code;
}

void protocol_criterion(Gate& g) {
  // Sampling structure on a fixture clustering.
  const auto bundle = read_bundle(testing::fixture("bundle_fte"));
  KMeansConfig kc;
  kc.k = 9;
  kc.seed = 3;
  const auto clustering = kmeans_cluster(bundle.vectors, bundle.manifest.tweet_ids, kc, ModelTag::fte);
  const auto sampled = sample_intruder_sets(clustering, kSamplesPerTopic, 11);
  std::map<std::size_t, std::size_t> per_topic;
  for (const auto& s : sampled.samples) {
    ++per_topic[s.topic];
    bool valid = true;
    try {
      s.validate(clustering);
    } catch (const InputError&) {
      valid = false;
    }
    g.require(valid && s.member_doc_ids.size() == 4 && s.presented_order.size() == 5, "4+1 structure");
  }
  for (const auto& [topic, n] : per_topic) g.require(n == 10, "topic " + std::to_string(topic) + " sets");
  g.require(per_topic.size() + sampled.skipped_topics.size() == 9, "topics accounted for");

  // Intruder uniformity over outside documents.
  std::vector<std::size_t> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(0);
  for (int i = 0; i < 4; ++i) labels.push_back(1);
  for (int i = 0; i < 11; ++i) labels.push_back(2);
  const auto small = make_clustering(labels, 3);
  std::map<std::string, double> counts;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) ++counts[sample_intruder_sets(small, 1, static_cast<std::uint64_t>(s)).samples[0].intruder_doc_id];
  double chi2 = 0;
  for (const auto& [id, n] : counts) chi2 += (n - draws / 15.0) * (n - draws / 15.0) / (draws / 15.0);
  g.require(counts.size() == 15 && chi2 < oracle::chi2_critical(14, 3.09), "intruder chi-square " + num(chi2));

  // Aggregation against a recount.
  std::vector<AnswerKey> answers;
  for (const auto& s : sampled.samples) answers.push_back(answer_for(s));
  const auto records = oracle::synthetic_records(answers, 4, 12);
  const auto summary = aggregate_scores(records, answers, EvalTask::cluster);
  std::map<std::size_t, std::array<double, 5>> acc;  // interp, useful, correct, unsure, n
  std::map<std::string, const AnswerKey*> by_id;
  for (const auto& a : answers) by_id[a.sample_id] = &a;
  for (const auto& r : records) {
    const auto& a = *by_id.at(r.sample_id);
    auto& x = acc[a.topic];
    x[0] += scale(r.interpretability);
    x[1] += scale(r.usefulness);
    x[2] += r.intruder_pick.has_value() && r.intruder_pick == a.intruder_position;
    x[3] += !r.intruder_pick.has_value();
    x[4] += 1;
  }
  g.require(summary.topics.size() == acc.size(), "topic rows");
  for (const auto& t : summary.topics) {
    const auto& x = acc.at(t.topic);
    g.require(std::abs(t.interpretability - x[0] / x[4]) <= 1e-12 && std::abs(t.usefulness - x[1] / x[4]) <= 1e-12 &&
                  std::abs(*t.correct_intruders - x[2] / x[4]) <= 1e-12 &&
                  std::abs(*t.unsure_intruders - x[3] / x[4]) <= 1e-12,
              "recount topic " + std::to_string(t.topic));
  }
  const auto csv = topic_scores_csv(nullptr, &summary);
  g.require(csv.rfind("model,topic,keyword_interpretability,keyword_usefulness,cluster_interpretability,"
                      "cluster_usefulness,correct_intruders,unsure_intruders\n",
                      0) == 0,
            "figure columns");
  std::istringstream rows(csv);
  std::string line;
  while (std::getline(rows, line)) g.require(std::count(line.begin(), line.end(), ',') == 7, "row width");

  // Two seeded full pipeline runs, then scoring of synthetic records.
  testing::TempDir dir;
  std::string err;
  for (const char* name : {"a", "b"}) {
    const int code = run_cli({"--seed", "2026", "pipeline", "--corpus", testing::fixture("tweets.jsonl").string(),
                              "--bundle", testing::fixture("bundle_fte").string(), "--bundle",
                              testing::fixture("bundle_bert").string(), "--out", (dir / name).string()},
                             err);
    g.require(code == 0, std::string("pipeline ") + name + ": " + err);
  }
  if (!g.ok()) return;
  g.require(snapshot(dir / "a") == snapshot(dir / "b"), "pipeline artifacts differ");
  const auto pipeline_answers = read_answers(dir / "a" / "sample-eval" / "answers.jsonl");
  std::string jsonl;
  for (const auto& r : oracle::synthetic_records(pipeline_answers, 3, 13)) jsonl += to_json(r).dump() + "\n";
  write_file_atomic(dir / "records.jsonl", jsonl);
  for (const char* name : {"score-a", "score-b"}) {
    g.require(run_cli({"score-eval", "--annotations", (dir / "records.jsonl").string(), "--answers",
                       (dir / "a" / "sample-eval" / "answers.jsonl").string(), "--out", (dir / name).string()},
                      err) == 0,
              std::string("score-eval: ") + err);
  }
  g.require(snapshot(dir / "score-a") == snapshot(dir / "score-b"), "score-eval artifacts differ");
}

struct Criterion {
  std::string name;
  double budget_s;  // 0 means no runtime bound
  std::function<void(Gate&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"kmeans: elkan matches lloyd, blobs recovered", 5, kmeans_criterion},
      {"lda: planted topics recovered", 30, lda_criterion},
      {"btm: biterm enumeration and planted purity", 30, btm_criterion},
      {"coherence: npmi bounds, count equivalence, c_v ranking", 60, coherence_criterion},
      {"tfidf: hand example, mdf monotone, 60-row grid", 0, tfidf_criterion},
      {"agreement: identity, hand example, relabel invariance", 0, agreement_criterion},
      {"kappa: unanimous, independent, direct formula", 0, kappa_criterion},
      {"evaluation protocol: sampling, aggregation, determinism", 0, protocol_criterion},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Gate g;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(g);
    } catch (const std::exception& e) {
      g.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0) g.require(secs < c.budget_s, "runtime " + num(secs) + " s over " + num(c.budget_s) + " s");
    const bool ok = g.ok();
    failed += !ok;
    std::ostringstream t;
    t.precision(3);
    t << std::fixed << secs;
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << " (" << g.summary() << ", " << t.str() << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
