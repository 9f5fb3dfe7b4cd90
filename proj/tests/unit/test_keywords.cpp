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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "stormtopics/error.hpp"
#include "stormtopics/kmeans.hpp"
#include "stormtopics/keywords.hpp"
#include "temp_dir.hpp"

using namespace stormtopics;

namespace {

Document doc(std::string id, std::vector<std::string> tokens) {
  Document d;
  d.id = std::move(id);
  d.tokens = std::move(tokens);
  return d;
}

Clustering clustering_of(std::vector<std::string> ids, std::vector<std::size_t> labels, std::size_t k) {
  Clustering c;
  c.k = k;
  c.ids = std::move(ids);
  c.labels = std::move(labels);
  return c;
}

// The two-cluster hand example: A = "snow snow road", B = "snow power".
struct HandExample {
  std::vector<Document> docs{doc("1", {"snow", "snow"}), doc("2", {"road"}), doc("3", {"snow", "power"})};
  Clustering c = clustering_of({"1", "2", "3"}, {0, 0, 1}, 2);
};

TopicKeywords keywords(std::map<std::string, double> scores, KeywordStrategy s) {
  TopicKeywords t;
  t.strategy = s;
  for (const auto& [term, v] : scores) t.ranked.push_back({term, v});
  std::sort(t.ranked.begin(), t.ranked.end(),
            [](const auto& a, const auto& b) { return a.score != b.score ? a.score > b.score : a.term < b.term; });
  return t;
}

void check_ranked(const TopicKeywords& t) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.ranked.size(); ++i) {
    CHECK(seen.insert(t.ranked[i].term).second);
    CHECK(std::isfinite(t.ranked[i].score));
    CHECK(t.ranked[i].score >= 0.0);
    if (i > 0) CHECK(t.ranked[i - 1].score >= t.ranked[i].score);
  }
}

}  // namespace

TEST_SUITE("tfidf") {
  TEST_CASE("hand example") {
    HandExample h;
    const auto kw = cluster_tfidf(h.c, h.docs, {});
    REQUIRE(kw.size() == 2);
    CHECK(std::abs(kw[0].score_of("snow") - 2.0) <= 1e-12);
    CHECK(std::abs(kw[0].score_of("road") - (std::log(1.5) + 1.0)) <= 1e-12);
    CHECK(kw[0].ranked.front().term == "snow");
    CHECK(std::abs(kw[1].score_of("power") - (std::log(1.5) + 1.0)) <= 1e-12);
    CHECK(kw[0].score_of("power") == 0.0);
  }

  TEST_CASE("mdf drops terms present in too many clusters") {
    HandExample h;
    TfIdfConfig cfg;
    cfg.max_document_frequency = 0.6;
    const auto kw = cluster_tfidf(h.c, h.docs, cfg);
    CHECK(kw[0].ranked.front().term == "road");
    CHECK(kw[0].score_of("snow") == 0.0);
    CHECK(kw[0].ranked.size() == 1);
  }

  TEST_CASE("sublinear term frequency") {
    HandExample h;
    TfIdfConfig cfg;
    cfg.sublinear_tf = true;
    const auto kw = cluster_tfidf(h.c, h.docs, cfg);
    CHECK(std::abs(kw[0].score_of("snow") - (1.0 + std::log(2.0))) <= 1e-12);
  }

  TEST_CASE("single cluster with one term") {
    const std::vector<Document> docs{doc("a", {"ice", "ice", "ice"})};
    const auto kw = cluster_tfidf(clustering_of({"a"}, {0}, 1), docs, {});
    REQUIRE(kw[0].ranked.size() == 1);
    CHECK(kw[0].ranked[0] == ScoredTerm{"ice", 3.0});
  }

  TEST_CASE("empty cluster is flagged") {
    const std::vector<Document> docs{doc("a", {"ice"})};
    const auto kw = cluster_tfidf(clustering_of({"a"}, {1}, 3), docs, {});
    CHECK(kw[0].empty_cluster);
    CHECK(kw[0].ranked.empty());
    CHECK_FALSE(kw[1].empty_cluster);
  }

  TEST_CASE("random corpora match the reference and obey the invariants") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t k = 2 + rng() % 5;
      std::vector<Document> docs;
      std::vector<std::string> ids;
      std::vector<std::size_t> labels;
      std::vector<std::vector<std::string>> cluster_docs(k);
      for (int d = 0; d < 40; ++d) {
        std::vector<std::string> t(1 + rng() % 6);
        for (auto& w : t) w = "t" + std::to_string(rng() % 15);
        const std::size_t z = rng() % k;
        cluster_docs[z].insert(cluster_docs[z].end(), t.begin(), t.end());
        docs.push_back(doc("d" + std::to_string(d), t));
        ids.push_back(docs.back().id);
        labels.push_back(z);
      }
      const auto c = clustering_of(ids, labels, k);
      std::set<std::string> previous;
      for (double mdf : {1.0, 0.9, 0.8, 0.7, 0.6}) {
        for (bool sub : {false, true}) {
          TfIdfConfig cfg;
          cfg.max_document_frequency = mdf;
          cfg.sublinear_tf = sub;
          const auto kw = cluster_tfidf(c, docs, cfg);
          std::set<std::string> kept;
          for (std::size_t z = 0; z < k; ++z) {
            check_ranked(kw[z]);
            const auto expect = oracle::tfidf(cluster_docs, z, mdf, sub);
            CHECK(kw[z].ranked.size() == expect.size());
            for (const auto& [term, score] : expect) CHECK(std::abs(kw[z].score_of(term) - score) <= 1e-12);
            for (const auto& st : kw[z].ranked) kept.insert(st.term);
          }
          if (!sub) {
            if (mdf < 1.0) CHECK(std::includes(previous.begin(), previous.end(), kept.begin(), kept.end()));
            previous = kept;
          }
        }
      }
      // Shuffling documents within clusters changes nothing.
      std::vector<std::size_t> order(docs.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<Document> shuffled;
      for (auto i : order) shuffled.push_back(docs[i]);
      CHECK(cluster_tfidf(c, shuffled, {}) == cluster_tfidf(c, docs, {}));
    }
  }
}

TEST_SUITE("attention") {
  EmbeddingBundle bundle_of(std::vector<std::string> ids, std::vector<std::vector<TokenAttention>> attention) {
    EmbeddingBundle b;
    b.manifest.tweet_ids = std::move(ids);
    b.manifest.n_tweets = b.manifest.tweet_ids.size();
    b.attention = std::move(attention);
    return b;
  }

  TEST_CASE("single tweet and summed tweets") {
    const auto b = bundle_of({"x"}, {{{"flood", 0.3}, {"help", 0.6}}});
    const auto r = attention_scores(clustering_of({"x"}, {0}, 1), b, {});
    REQUIRE(r.topics[0].ranked.size() == 2);
    CHECK(r.topics[0].ranked[0] == ScoredTerm{"help", 0.6});
    CHECK(r.topics[0].ranked[1] == ScoredTerm{"flood", 0.3});

    const auto three = bundle_of({"a", "b", "c"}, {{{"plow", 0.1}}, {{"plow", 0.2}}, {{"plow", 0.3}}});
    const auto s = attention_scores(clustering_of({"a", "b", "c"}, {0, 0, 0}, 1), three, {});
    CHECK(s.topics[0].score_of("plow") == doctest::Approx(0.6).epsilon(1e-15));
  }

  TEST_CASE("surface tokens pass the corpus filters") {
    const auto b = bundle_of({"x"}, {{{"#Blizzard", 0.5}, {"the", 0.9}, {"https://t.co/abc", 0.8}, {"!", 0.4}}});
    const auto r = attention_scores(clustering_of({"x"}, {0}, 1), b, {});
    REQUIRE(r.topics[0].ranked.size() == 1);
    CHECK(r.topics[0].ranked[0].term == "blizzard");
  }

  TEST_CASE("missing documents are counted") {
    const auto b = bundle_of({"x"}, {{{"ice", 1.0}}});
    const auto r = attention_scores(clustering_of({"x", "y"}, {0, 0}, 1), b, {});
    CHECK(r.skipped_docs == 1);
  }

  TEST_CASE("random bundles match brute-force accumulation") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<std::string> words{"snow", "power", "outage", "roads", "plow", "storm", "shelter"};
    std::vector<std::string> ids;
    std::vector<std::vector<TokenAttention>> att;
    std::vector<std::size_t> labels;
    std::vector<std::map<std::string, double>> expect(3), expect_norm(3);
    for (int d = 0; d < 50; ++d) {
      ids.push_back("r" + std::to_string(d));
      labels.push_back(rng() % 3);
      std::vector<TokenAttention> rec(1 + rng() % 8);
      double total = 0;
      for (auto& ta : rec) {
        ta = {words[rng() % words.size()], u(rng)};
        total += ta.score;
      }
      for (const auto& ta : rec) {
        expect[labels.back()][ta.token] += ta.score;
        expect_norm[labels.back()][ta.token] += ta.score / total;
      }
      att.push_back(rec);
    }
    const auto b = bundle_of(ids, att);
    const auto c = clustering_of(ids, labels, 3);
    const auto raw = attention_scores(c, b, {});
    const auto norm = attention_scores(c, b, {}, {.normalize_per_tweet = true});
    for (std::size_t z = 0; z < 3; ++z) {
      check_ranked(raw.topics[z]);
      CHECK(raw.topics[z].ranked.size() == expect[z].size());
      for (const auto& [w, v] : expect[z]) CHECK(raw.topics[z].score_of(w) == doctest::Approx(v).epsilon(1e-12));
      for (const auto& [w, v] : expect_norm[z]) {
        CHECK(norm.topics[z].score_of(w) == doctest::Approx(v).epsilon(1e-12));
      }
    }
  }
}

TEST_SUITE("combined") {
  TEST_CASE("hand example and absence rule") {
    const auto t = keywords({{"a", 2}, {"b", 1}, {"only_tfidf", 5}}, KeywordStrategy::tfidf);
    const auto a = keywords({{"a", 0.1}, {"b", 0.5}}, KeywordStrategy::attention);
    const auto c = combined_scores(t, a);
    CHECK(c.strategy == KeywordStrategy::combined);
    REQUIRE(c.ranked.size() == 2);
    CHECK(c.ranked[0].term == "b");
    CHECK(c.ranked[0].score == doctest::Approx(0.5));
    CHECK(c.ranked[1].term == "a");
    CHECK(c.ranked[1].score == doctest::Approx(0.2));
  }

  TEST_CASE("random maps match the elementwise product") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::map<std::string, double> x, y;
      for (int i = 0; i < 20; ++i) {
        if (rng() % 3) x["w" + std::to_string(i)] = u(rng);
        if (rng() % 3) y["w" + std::to_string(i)] = u(rng);
      }
      std::map<std::string, double> prod;
      for (const auto& [w, v] : x) {
        if (y.contains(w)) prod[w] = v * y[w];
      }
      const auto c = combined_scores(keywords(x, KeywordStrategy::tfidf), keywords(y, KeywordStrategy::attention));
      CHECK(c.ranked == keywords(prod, KeywordStrategy::combined).ranked);
    }
  }
}

TEST_SUITE("grid") {
  struct FixtureRun {
    std::vector<Document> docs;
    EmbeddingBundle bundle;
    Clustering clustering;
    PreprocessConfig pre;

    FixtureRun() {
      docs = tokenize_all(load_tweets(testing::fixture("tweets.jsonl"), TweetFormat::jsonl), pre);
      bundle = read_bundle(testing::fixture("bundle_fte"));
      REQUIRE(align(bundle, docs).size() == docs.size());
      KMeansConfig cfg;
      cfg.k = 5;
      cfg.seed = 3;
      clustering = kmeans_cluster(bundle.vectors, bundle.manifest.tweet_ids, cfg, ModelTag::fte);
    }
  };

  TEST_CASE("full grid has sixty rows and a first-maximum best") {
    FixtureRun f;
    const auto g = grid_search(f.clustering, f.docs, &f.bundle, f.pre, {}, 5);
    REQUIRE(g.rows.size() == 60);
    std::set<std::tuple<double, bool, bool, KeywordStrategy>> cells;
    std::size_t first_max = 0;
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
      const auto& r = g.rows[i];
      CHECK(r.k == 5);
      CHECK(std::isfinite(r.c_v));
      cells.insert({r.cell.mdf, r.cell.sublinear, r.cell.phrases, r.cell.strategy});
      if (r.c_v > g.rows[first_max].c_v) first_max = i;
    }
    CHECK(cells.size() == 60);
    CHECK(g.best == first_max);
    CHECK(g.best_keywords.size() == 5);
    const auto csv = grid_to_csv(g.rows);
    CHECK(csv.rfind("k,mdf,sublinear,phrases,strategy,c_v\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
  }

  TEST_CASE("single configuration wins by default") {
    FixtureRun f;
    GridOptions opts;
    opts.mdf = {0.8};
    opts.sublinear = {true};
    opts.phrases = {false};
    opts.strategies = {KeywordStrategy::tfidf};
    const auto g = grid_search(f.clustering, f.docs, nullptr, f.pre, {}, 5, opts);
    REQUIRE(g.rows.size() == 1);
    CHECK(g.best == 0);
    TfIdfConfig cfg;
    cfg.max_document_frequency = 0.8;
    cfg.sublinear_tf = true;
    const auto direct = cluster_tfidf(f.clustering, f.docs, cfg);
    CHECK(keyword_terms(g.best_keywords) == keyword_terms(direct));
  }

  TEST_CASE("attention strategies need a bundle") {
    FixtureRun f;
    GridOptions opts;
    opts.strategies = {KeywordStrategy::attention};
    CHECK_THROWS_AS(grid_search(f.clustering, f.docs, nullptr, f.pre, {}, 5, opts), InputError);
  }
}

TEST_SUITE("serialisation") {
  TEST_CASE("json round-trip and csv layout") {
    HandExample h;
    const auto kw = cluster_tfidf(h.c, h.docs, {});
    const auto table = keywords_from_json(keywords_to_json(kw, ModelTag::lda, 2));
    CHECK(table.model_tag == ModelTag::lda);
    CHECK(table.k == 2);
    CHECK(table.topics == kw);
    const auto csv = keywords_to_csv(kw);
    CHECK(csv.rfind("topic,strategy,rank,term,score\n", 0) == 0);
    CHECK(csv.find("\n0,tfidf,1,snow,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const auto top1 = keywords_to_csv(kw, 1);
    CHECK(std::count(top1.begin(), top1.end(), '\n') == 3);
  }

  TEST_CASE("phi keywords and strategy names") {
    const Matrix phi(2, 3, {0.1, 0.7, 0.2, 0.5, 0.25, 0.25});
    const std::vector<std::string> vocab{"ice", "snow", "wind"};
    const auto kw = phi_keywords(phi, vocab, 2);
    CHECK(kw[0].terms() == std::vector<std::string>{"snow", "wind"});
    CHECK(kw[1].terms() == std::vector<std::string>{"ice", "snow"});
    CHECK(keyword_strategy_from_string("combined") == KeywordStrategy::combined);
    CHECK(to_string(KeywordStrategy::attention) == "attention");
    CHECK_THROWS_AS(keyword_strategy_from_string("bm25"), InputError);
  }
}
