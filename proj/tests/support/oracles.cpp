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
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace stormtopics::oracle {

namespace {

double sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

std::vector<std::vector<double>> means(const std::vector<std::vector<double>>& points,
                                       const std::vector<std::size_t>& labels, std::size_t k,
                                       std::vector<std::size_t>& counts) {
  const std::size_t dim = points.front().size();
  std::vector<std::vector<double>> m(k, std::vector<double>(dim, 0.0));
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) m[labels[i]][d] += points[i][d];
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (auto& v : m[c]) v /= static_cast<double>(counts[c]);
  }
  return m;
}

}  // namespace

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

LloydResult lloyd(const std::vector<std::vector<double>>& points, std::vector<std::vector<double>> centers,
                  std::size_t max_iter, double shift_threshold) {
  const std::size_t k = centers.size();
  const auto assign = [&](const std::vector<std::vector<double>>& cs) {
    std::vector<std::size_t> labels(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < k; ++c) {
        if (sq(points[i], cs[c]) < sq(points[i], cs[best])) best = c;
      }
      labels[i] = best;
    }
    return labels;
  };
  auto labels = assign(centers);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<std::size_t> counts;
    auto updated = means(points, labels, k, counts);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = points.size();
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (counts[labels[i]] <= 1) continue;
        const double d = sq(points[i], updated[labels[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == points.size()) break;
      labels[far] = c;
      updated = means(points, labels, k, counts);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) shift += sq(centers[c], updated[c]);
    centers = updated;
    const auto next = assign(centers);
    const bool unchanged = next == labels;
    labels = next;
    if (unchanged || shift <= shift_threshold) break;
  }
  LloydResult r;
  r.labels = labels;
  r.centers = centers;
  for (std::size_t i = 0; i < points.size(); ++i) r.inertia += sq(points[i], centers[labels[i]]);
  return r;
}

std::map<std::pair<std::string, std::string>, std::size_t> biterm_counts(const std::vector<std::string>& tokens,
                                                                         std::size_t window) {
  std::map<std::pair<std::string, std::string>, std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      if (j <= i || j - i >= window) continue;
      auto p = std::minmax(tokens[i], tokens[j]);
      ++out[{p.first, p.second}];
    }
  }
  return out;
}

std::vector<std::set<std::string>> window_contexts(const std::vector<std::vector<std::string>>& docs,
                                                   std::size_t window, bool truncated_tail) {
  std::vector<std::set<std::string>> out;
  for (const auto& d : docs) {
    if (truncated_tail) {
      for (std::size_t s = 0; s < d.size(); ++s) {
        std::set<std::string> ctx;
        for (std::size_t i = s; i < d.size() && i < s + window; ++i) ctx.insert(d[i]);
        out.push_back(ctx);
      }
    } else if (d.size() <= window) {
      out.emplace_back(d.begin(), d.end());
    } else {
      for (std::size_t s = 0; s + window <= d.size(); ++s) {
        out.emplace_back(d.begin() + static_cast<std::ptrdiff_t>(s),
                         d.begin() + static_cast<std::ptrdiff_t>(s + window));
      }
    }
  }
  return out;
}

std::vector<std::set<std::string>> document_contexts(const std::vector<std::vector<std::string>>& docs) {
  std::vector<std::set<std::string>> out;
  for (const auto& d : docs) out.emplace_back(d.begin(), d.end());
  return out;
}

double npmi(const std::vector<std::set<std::string>>& contexts, const std::string& a, const std::string& b,
            double epsilon) {
  double na = 0, nb = 0, nab = 0;
  for (const auto& c : contexts) {
    const bool ha = c.contains(a), hb = c.contains(b);
    na += ha;
    nb += hb;
    nab += ha && hb;
  }
  const double n = static_cast<double>(contexts.size());
  if (n == 0 || na == 0 || nb == 0) return -1.0;
  if (nab == n) return 0.0;
  const double p1 = na / n, p2 = nb / n, p12 = nab / n;
  return std::log((p12 + epsilon) / (p1 * p2)) / -std::log(p12 + epsilon);
}

std::map<std::string, double> tfidf(const std::vector<std::vector<std::string>>& cluster_docs, std::size_t topic,
                                    double mdf, bool sublinear) {
  const double k = static_cast<double>(cluster_docs.size());
  std::map<std::string, double> out;
  std::map<std::string, double> tf;
  for (const auto& t : cluster_docs[topic]) tf[t] += 1.0;
  for (const auto& [term, count] : tf) {
    double df = 0;
    for (const auto& d : cluster_docs) df += std::find(d.begin(), d.end(), term) != d.end();
    if (df > mdf * k) continue;
    const double idf = std::log((1.0 + k) / (1.0 + df)) + 1.0;
    out[term] = (sublinear ? 1.0 + std::log(count) : count) * idf;
  }
  return out;
}

std::vector<std::set<std::string>> id_sets(const Clustering& c) {
  std::vector<std::set<std::string>> out(c.k);
  for (std::size_t i = 0; i < c.ids.size(); ++i) out[c.labels[i]].insert(c.ids[i]);
  return out;
}

double directed_agreement(const std::vector<std::set<std::string>>& a, const std::vector<std::set<std::string>>& b) {
  double total = 0.0;
  double n = 0.0;
  for (const auto& ai : a) {
    if (ai.empty()) continue;
    double best = 0.0;
    for (const auto& bj : b) {
      std::vector<std::string> both;
      std::set_intersection(ai.begin(), ai.end(), bj.begin(), bj.end(), std::back_inserter(both));
      best = std::max(best, static_cast<double>(both.size()) / static_cast<double>(ai.size()));
    }
    total += best;
    n += 1.0;
  }
  return total / n;
}

double fleiss_kappa(const std::vector<std::vector<std::size_t>>& ratings, std::size_t n_categories) {
  // Observed agreement: fraction of agreeing ordered rater pairs per item.
  double observed = 0.0;
  std::vector<double> share(n_categories, 0.0);
  double total = 0.0;
  for (const auto& item : ratings) {
    double agree = 0.0, pairs = 0.0;
    for (std::size_t x = 0; x < item.size(); ++x) {
      for (std::size_t y = 0; y < item.size(); ++y) {
        if (x == y) continue;
        pairs += 1.0;
        agree += item[x] == item[y];
      }
      share[item[x]] += 1.0;
      total += 1.0;
    }
    observed += agree / pairs;
  }
  observed /= static_cast<double>(ratings.size());
  double chance = 0.0;
  for (double s : share) chance += (s / total) * (s / total);
  return (observed - chance) / (1.0 - chance);
}

double chi2_critical(double df, double z) {
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

std::vector<AnnotationRecord> synthetic_records(const std::vector<AnswerKey>& answers, std::size_t annotators,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AnnotationRecord> out;
  for (const auto& a : answers) {
    for (std::size_t r = 0; r < annotators; ++r) {
      AnnotationRecord rec;
      rec.sample_id = a.sample_id;
      rec.annotator_id = "annotator-" + std::to_string(r);
      rec.task = a.task;
      rec.interpretability = static_cast<Interpretability>(rng() % 3);
      if (a.task == EvalTask::cluster) {
        rec.usefulness = rng() % 2 == 0 ? Usefulness::useful : Usefulness::useless;
        const auto pick = rng() % 7;  // biased toward the right answer
        if (pick < 5) {
          rec.intruder_pick = pick;
        } else if (pick == 5) {
          rec.intruder_pick = a.intruder_position;
        }
      } else {
        rec.usefulness = static_cast<Usefulness>(rng() % 3);
      }
      out.push_back(rec);
    }
  }
  return out;
}

PlantedCorpus planted_corpus(std::size_t n_docs, std::size_t doc_len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> word(0, 9);
  PlantedCorpus out;
  for (std::size_t i = 0; i < n_docs; ++i) {
    const std::size_t t = i % 2;
    Document d;
    d.id = "p" + std::to_string(1000 + i);
    for (std::size_t j = 0; j < doc_len; ++j) d.tokens.push_back((t == 0 ? "a" : "b") + std::to_string(word(rng)));
    out.docs.push_back(std::move(d));
    out.truth.push_back(t);
  }
  return out;
}

double purity(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& truth) {
  std::map<std::size_t, std::map<std::size_t, std::size_t>> table;
  for (std::size_t i = 0; i < labels.size(); ++i) ++table[labels[i]][truth[i]];
  std::size_t hit = 0;
  for (const auto& [label, row] : table) {
    std::size_t best = 0;
    for (const auto& [t, c] : row) best = std::max(best, c);
    hit += best;
  }
  return labels.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(labels.size());
}

}  // namespace stormtopics::oracle
