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
#include "stormtopics/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <unordered_map>

#include "stormtopics/error.hpp"
#include "stormtopics/io.hpp"
#include "stormtopics/prob_topics.hpp"

namespace stormtopics {

namespace {

void rank(std::vector<ScoredTerm>& terms) {
  std::sort(terms.begin(), terms.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
    return a.score > b.score || (a.score == b.score && a.term < b.term);
  });
}

std::vector<ScoredTerm> ranked_from(const std::map<std::string, double>& scores) {
  std::vector<ScoredTerm> out;
  out.reserve(scores.size());
  for (const auto& [t, s] : scores) out.push_back({t, s});
  rank(out);
  return out;
}

// Documents of each topic, in clustering order.
std::vector<std::vector<const Document*>> group_documents(const Clustering& clustering,
                                                          std::span<const Document> docs) {
  std::unordered_map<std::string_view, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);
  std::vector<std::vector<const Document*>> groups(clustering.k);
  for (std::size_t i = 0; i < clustering.ids.size(); ++i) {
    const auto it = by_id.find(clustering.ids[i]);
    if (it == by_id.end()) throw InputError("clustered document \"" + clustering.ids[i] + "\" missing from corpus");
    groups.at(clustering.labels[i]).push_back(it->second);
  }
  return groups;
}

std::vector<Document> clustered_documents(const Clustering& clustering, std::span<const Document> docs) {
  std::unordered_map<std::string_view, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);
  std::vector<Document> out;
  out.reserve(clustering.ids.size());
  for (const auto& id : clustering.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError("clustered document \"" + id + "\" missing from corpus");
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace

std::string_view to_string(KeywordStrategy s) {
  switch (s) {
    case KeywordStrategy::tfidf: return "tfidf";
    case KeywordStrategy::attention: return "attention";
    case KeywordStrategy::combined: return "combined";
    case KeywordStrategy::phi: return "phi";
  }
  return "tfidf";
}

KeywordStrategy keyword_strategy_from_string(std::string_view name) {
  for (auto s : {KeywordStrategy::tfidf, KeywordStrategy::attention, KeywordStrategy::combined, KeywordStrategy::phi}) {
    if (to_string(s) == name) return s;
  }
  throw InputError("unknown keyword strategy \"" + std::string(name) + "\"");
}

double TopicKeywords::score_of(std::string_view term) const {
  for (const auto& st : ranked) {
    if (st.term == term) return st.score;
  }
  return 0.0;
}

std::vector<std::string> TopicKeywords::terms(std::size_t limit) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(ranked[i].term);
  return out;
}

std::vector<TopicKeywords> cluster_tfidf(const Clustering& clustering, std::span<const Document> docs,
                                         const TfIdfConfig& cfg) {
  if (!(cfg.max_document_frequency > 0.0 && cfg.max_document_frequency <= 1.0)) {
    throw InputError("max_document_frequency must lie in (0, 1]");
  }
  std::vector<Document> phrased;
  std::span<const Document> source = docs;
  if (cfg.use_phrases) {
    phrased = detect_phrases(clustered_documents(clustering, docs), cfg.phrases);
    source = phrased;
  }
  const auto groups = group_documents(clustering, source);
  const std::size_t k = clustering.k;

  std::vector<std::map<std::string, std::uint64_t>> tf(k);
  std::map<std::string, std::uint64_t> df;
  for (std::size_t z = 0; z < k; ++z) {
    for (const Document* d : groups[z]) {
      for (const auto& t : d->tokens) ++tf[z][t];
    }
    for (const auto& [t, _] : tf[z]) ++df[t];
  }
  const double kd = static_cast<double>(k);
  const double max_df = cfg.max_document_frequency * kd;

  std::vector<TopicKeywords> out;
  for (std::size_t z = 0; z < k; ++z) {
    TopicKeywords tk{z, KeywordStrategy::tfidf, {}, tf[z].empty()};
    for (const auto& [t, count] : tf[z]) {
      const double d = static_cast<double>(df[t]);
      if (d > max_df) continue;
      const double c = static_cast<double>(count);
      const double weight = cfg.sublinear_tf ? 1.0 + std::log(c) : c;
      const double idf = std::log((1.0 + kd) / (1.0 + d)) + 1.0;
      tk.ranked.push_back({t, weight * idf});
    }
    rank(tk.ranked);
    out.push_back(std::move(tk));
  }
  return out;
}

AttentionKeywords attention_scores(const Clustering& clustering, const EmbeddingBundle& bundle,
                                   const PreprocessConfig& preprocess, const AttentionOptions& opts) {
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t r = 0; r < bundle.manifest.tweet_ids.size(); ++r) row_of.emplace(bundle.manifest.tweet_ids[r], r);
  // Cleaning is memoised per distinct surface token.
  std::unordered_map<std::string, std::vector<std::string>> cleaned;
  std::vector<std::map<std::string, double>> sums(clustering.k);
  AttentionKeywords out;
  for (std::size_t i = 0; i < clustering.ids.size(); ++i) {
    const auto it = row_of.find(clustering.ids[i]);
    if (it == row_of.end()) {
      ++out.skipped_docs;
      continue;
    }
    const auto& record = bundle.attention[it->second];
    double norm = 1.0;
    if (opts.normalize_per_tweet) {
      double total = 0.0;
      for (const auto& ta : record) total += ta.score;
      norm = total > 0.0 ? total : 1.0;
    }
    auto& topic = sums.at(clustering.labels[i]);
    for (const auto& ta : record) {
      auto [c, inserted] = cleaned.try_emplace(ta.token);
      if (inserted) c->second = clean_surface_token(ta.token, preprocess);
      for (const auto& word : c->second) topic[word] += ta.score / norm;
    }
  }
  for (std::size_t z = 0; z < clustering.k; ++z) {
    out.topics.push_back({z, KeywordStrategy::attention, ranked_from(sums[z]), sums[z].empty()});
  }
  return out;
}

TopicKeywords combined_scores(const TopicKeywords& tfidf, const TopicKeywords& attention) {
  if (tfidf.topic != attention.topic) throw InputError("combined scores need keywords of the same topic");
  std::unordered_map<std::string_view, double> attn;
  for (const auto& st : attention.ranked) attn.emplace(st.term, st.score);
  TopicKeywords out{tfidf.topic, KeywordStrategy::combined, {}, tfidf.empty_cluster || attention.empty_cluster};
  for (const auto& st : tfidf.ranked) {
    if (const auto it = attn.find(st.term); it != attn.end()) out.ranked.push_back({st.term, st.score * it->second});
  }
  rank(out.ranked);
  return out;
}

std::vector<TopicKeywords> combined_scores(std::span<const TopicKeywords> tfidf,
                                           std::span<const TopicKeywords> attention) {
  if (tfidf.size() != attention.size()) throw InputError("keyword tables differ in topic count");
  std::vector<TopicKeywords> out;
  for (std::size_t z = 0; z < tfidf.size(); ++z) out.push_back(combined_scores(tfidf[z], attention[z]));
  return out;
}

std::vector<TopicKeywords> phi_keywords(const Matrix& phi, std::span<const std::string> vocabulary, std::size_t m) {
  std::vector<TopicKeywords> out;
  const auto top = topic_top_words(phi, m);
  for (std::size_t z = 0; z < top.size(); ++z) {
    TopicKeywords tk{z, KeywordStrategy::phi, {}, false};
    for (auto w : top[z]) tk.ranked.push_back({vocabulary[w], phi(z, w)});
    out.push_back(std::move(tk));
  }
  return out;
}

std::vector<std::vector<std::string>> keyword_terms(std::span<const TopicKeywords> topics, std::size_t limit) {
  std::vector<std::vector<std::string>> out;
  for (const auto& t : topics) out.push_back(t.terms(limit));
  return out;
}

GridResult grid_search(const Clustering& clustering, std::span<const Document> docs, const EmbeddingBundle* bundle,
                       const PreprocessConfig& preprocess, const CoherenceConfig& coherence,
                       std::size_t k_for_selection, const GridOptions& opts) {
  const bool wants_attention = std::any_of(opts.strategies.begin(), opts.strategies.end(), [](KeywordStrategy s) {
    return s == KeywordStrategy::attention || s == KeywordStrategy::combined;
  });
  if (wants_attention && bundle == nullptr) throw InputError("attention strategies need an embedding bundle");
  if (clustering.k != k_for_selection) {
    throw InputError("grid search over k=" + std::to_string(clustering.k) + " cannot select for k=" +
                     std::to_string(k_for_selection));
  }

  const auto reference = clustered_documents(clustering, docs);
  std::optional<CoherenceEvaluator> plain_eval;
  std::optional<CoherenceEvaluator> phrased_eval;
  auto evaluator = [&](bool phrases) -> const CoherenceEvaluator& {
    auto& slot = phrases ? phrased_eval : plain_eval;
    if (!slot) {
      slot.emplace(phrases ? std::span<const Document>(detect_phrases(reference, opts.phrase_config))
                           : std::span<const Document>(reference),
                   coherence);
    }
    return *slot;
  };
  std::vector<TopicKeywords> attention;
  if (wants_attention) attention = attention_scores(clustering, *bundle, preprocess, opts.attention).topics;

  GridResult result;
  std::vector<std::vector<TopicKeywords>> cell_keywords;
  for (double mdf : opts.mdf) {
    for (bool sublinear : opts.sublinear) {
      for (bool phrases : opts.phrases) {
        std::optional<std::vector<TopicKeywords>> tfidf;
        for (KeywordStrategy strategy : opts.strategies) {
          std::vector<TopicKeywords> kw;
          if (strategy == KeywordStrategy::attention) {
            kw = attention;
          } else {
            if (!tfidf) tfidf = cluster_tfidf(clustering, reference, {mdf, sublinear, phrases, opts.phrase_config});
            kw = strategy == KeywordStrategy::combined ? combined_scores(*tfidf, attention) : *tfidf;
          }
          const auto topics = keyword_terms(kw, opts.topn);
          const double cv = evaluator(phrases).score(topics, CoherenceMetric::c_v).mean;
          result.rows.push_back({clustering.k, {mdf, sublinear, phrases, strategy}, cv});
          cell_keywords.push_back(std::move(kw));
        }
      }
    }
  }
  if (result.rows.empty()) throw InputError("grid search has no configurations");
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    const double v = std::isnan(result.rows[r].c_v) ? -std::numeric_limits<double>::infinity() : result.rows[r].c_v;
    if (!found || v > best) {
      best = v;
      result.best = r;
      found = true;
    }
  }
  result.best_keywords = std::move(cell_keywords[result.best]);
  return result;
}

std::string keywords_to_csv(std::span<const TopicKeywords> topics, std::size_t limit) {
  std::string out = "topic,strategy,rank,term,score\n";
  for (const auto& t : topics) {
    for (std::size_t r = 0; r < t.ranked.size() && r < limit; ++r) {
      out += std::to_string(t.topic) + "," + std::string(to_string(t.strategy)) + "," + std::to_string(r + 1) + "," +
             csv_field(t.ranked[r].term) + "," + format_double(t.ranked[r].score) + "\n";
    }
  }
  return out;
}

nlohmann::json keywords_to_json(std::span<const TopicKeywords> topics, ModelTag tag, std::size_t k) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : topics) {
    nlohmann::json kws = nlohmann::json::array();
    for (const auto& st : t.ranked) kws.push_back({{"term", st.term}, {"score", st.score}});
    list.push_back({{"topic", t.topic},
                    {"strategy", std::string(to_string(t.strategy))},
                    {"empty_cluster", t.empty_cluster},
                    {"keywords", std::move(kws)}});
  }
  return {{"model_tag", std::string(to_string(tag))}, {"k", k}, {"topics", std::move(list)}};
}

KeywordTable keywords_from_json(const nlohmann::json& j) {
  KeywordTable table;
  try {
    table.model_tag = model_tag_from_string(j.at("model_tag").get<std::string>());
    table.k = j.at("k").get<std::size_t>();
    for (const auto& t : j.at("topics")) {
      TopicKeywords tk;
      tk.topic = t.at("topic").get<std::size_t>();
      tk.strategy = keyword_strategy_from_string(t.at("strategy").get<std::string>());
      tk.empty_cluster = t.value("empty_cluster", false);
      for (const auto& kw : t.at("keywords")) tk.ranked.push_back({kw.at("term").get<std::string>(), kw.at("score").get<double>()});
      table.topics.push_back(std::move(tk));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed keyword table: ") + e.what());
  }
  return table;
}

KeywordTable read_keywords(const std::filesystem::path& path) {
  try {
    return keywords_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string grid_to_csv(std::span<const GridRow> rows) {
  std::string out = "k,mdf,sublinear,phrases,strategy,c_v\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + format_double(r.cell.mdf) + "," + (r.cell.sublinear ? "1" : "0") + "," +
           (r.cell.phrases ? "1" : "0") + "," + std::string(to_string(r.cell.strategy)) + "," + format_double(r.c_v) +
           "\n";
  }
  return out;
}

}  // namespace stormtopics
