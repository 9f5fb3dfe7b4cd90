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
#include "stormtopics/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "stormtopics/error.hpp"

namespace stormtopics {

namespace {

constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

void require_pairs(std::span<const std::string> topic) {
  if (topic.size() < 2) throw InputError("coherence needs at least two topic terms");
}

}  // namespace

std::string_view to_string(CoherenceMetric metric) { return metric == CoherenceMetric::c_v ? "cv" : "cnpmi"; }

CoherenceMetric coherence_metric_from_string(std::string_view name) {
  if (name == "cv" || name == "c_v") return CoherenceMetric::c_v;
  if (name == "cnpmi" || name == "c_npmi") return CoherenceMetric::c_npmi;
  throw InputError("unknown coherence metric \"" + std::string(name) + "\"");
}

std::uint32_t CooccurrenceCounts::intern(const std::string& term) {
  auto [it, inserted] = index_.try_emplace(term, static_cast<std::uint32_t>(singles_.size()));
  if (inserted) singles_.push_back(0);
  return it->second;
}

std::uint32_t CooccurrenceCounts::lookup(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  return it == index_.end() ? kMissing : it->second;
}

void CooccurrenceCounts::add_context(std::span<const std::string> tokens) {
  ++n_contexts_;
  scratch_.clear();
  for (const auto& t : tokens) scratch_.push_back(intern(t));
  std::sort(scratch_.begin(), scratch_.end());
  scratch_.erase(std::unique(scratch_.begin(), scratch_.end()), scratch_.end());
  for (std::size_t i = 0; i < scratch_.size(); ++i) {
    ++singles_[scratch_[i]];
    for (std::size_t j = i + 1; j < scratch_.size(); ++j) ++pairs_[pair_key(scratch_[i], scratch_[j])];
  }
}

std::uint64_t CooccurrenceCounts::single(std::string_view term) const {
  const auto id = lookup(term);
  return id == kMissing ? 0 : singles_[id];
}

std::uint64_t CooccurrenceCounts::pair(std::string_view a, std::string_view b) const {
  const auto ia = lookup(a);
  const auto ib = lookup(b);
  if (ia == kMissing || ib == kMissing) return 0;
  if (ia == ib) return singles_[ia];
  const auto it = pairs_.find(pair_key(ia, ib));
  return it == pairs_.end() ? 0 : it->second;
}

CooccurrenceCounts count_windows(std::span<const Document> docs, std::size_t window, bool truncated_tail) {
  if (window < 2) throw InputError("coherence window must be at least 2");
  CooccurrenceCounts counts(CountMode::window);
  for (const auto& doc : docs) {
    const std::span<const std::string> t = doc.tokens;
    if (truncated_tail) {
      for (std::size_t i = 0; i < t.size(); ++i) counts.add_context(t.subspan(i, std::min(window, t.size() - i)));
    } else if (t.size() <= window) {
      counts.add_context(t);
    } else {
      for (std::size_t i = 0; i + window <= t.size(); ++i) counts.add_context(t.subspan(i, window));
    }
  }
  return counts;
}

CooccurrenceCounts count_documents(std::span<const Document> docs) {
  CooccurrenceCounts counts(CountMode::document);
  for (const auto& doc : docs) counts.add_context(doc.tokens);
  return counts;
}

double npmi(const CooccurrenceCounts& counts, std::string_view w1, std::string_view w2, double epsilon,
            double gamma) {
  const auto n = counts.n_contexts();
  const auto c1 = counts.single(w1);
  const auto c2 = counts.single(w2);
  if (n == 0 || c1 == 0 || c2 == 0) return kNpmiFloor;
  const auto c12 = counts.pair(w1, w2);
  if (c12 == n) return 0.0;
  const double nn = static_cast<double>(n);
  const double p1 = static_cast<double>(c1) / nn;
  const double p2 = static_cast<double>(c2) / nn;
  const double p12 = static_cast<double>(c12) / nn;
  const double pmi = std::log((p12 + epsilon) / (p1 * p2));
  const double value = pmi / -std::log(p12 + epsilon);
  if (gamma == 1.0) return value;
  return std::copysign(std::pow(std::abs(value), gamma), value);
}

TopicCoherence c_npmi(std::span<const std::string> topic, const CooccurrenceCounts& counts, double epsilon,
                      double gamma) {
  require_pairs(topic);
  TopicCoherence out;
  for (const auto& w : topic) out.absent_terms += counts.single(w) == 0;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < topic.size(); ++i) {
    for (std::size_t j = i + 1; j < topic.size(); ++j) {
      sum += npmi(counts, topic[i], topic[j], epsilon, gamma);
      ++n;
    }
  }
  out.score = sum / static_cast<double>(n);
  return out;
}

std::vector<double> context_vector(std::string_view w, std::span<const std::string> context,
                                   const CooccurrenceCounts& counts, double epsilon, double gamma) {
  std::vector<double> v(context.size());
  for (std::size_t j = 0; j < context.size(); ++j) v[j] = npmi(counts, w, context[j], epsilon, gamma);
  return v;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

TopicCoherence c_v(std::span<const std::string> topic, const CooccurrenceCounts& counts,
                   std::span<const std::string> context, const CoherenceConfig& cfg) {
  require_pairs(topic);
  TopicCoherence out;
  std::vector<std::vector<double>> vectors;
  vectors.reserve(topic.size());
  for (const auto& w : topic) {
    out.absent_terms += counts.single(w) == 0;
    vectors.push_back(context_vector(w, context, counts, cfg.epsilon, cfg.gamma));
  }
  double sum = 0.0;
  std::size_t n = 0;
  if (cfg.segmentation == CvSegmentation::pairwise) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      for (std::size_t j = i + 1; j < vectors.size(); ++j) {
        sum += cosine(vectors[i], vectors[j]);
        ++n;
      }
    }
  } else {
    std::vector<double> total(context.size(), 0.0);
    for (const auto& v : vectors) {
      for (std::size_t j = 0; j < v.size(); ++j) total[j] += v[j];
    }
    for (const auto& v : vectors) {
      sum += cosine(v, total);
      ++n;
    }
  }
  out.score = sum / static_cast<double>(n);
  return out;
}

std::vector<std::string> topic_union(std::span<const std::vector<std::vector<std::string>>> models) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& topics : models) {
    for (const auto& topic : topics) {
      for (const auto& w : topic) {
        if (seen.insert(w).second) out.push_back(w);
      }
    }
  }
  return out;
}

CoherenceEvaluator::CoherenceEvaluator(std::span<const Document> reference, CoherenceConfig cfg)
    : cfg_(cfg),
      windows_(count_windows(reference, cfg.window, cfg.truncated_tail)),
      documents_(count_documents(reference)) {
  if (cfg_.epsilon <= 0.0) throw InputError("epsilon must be positive");
  if (cfg_.topn < 2) throw InputError("topn must be at least 2");
  std::unordered_set<std::string> seen;
  for (const auto& d : reference) {
    for (const auto& t : d.tokens) {
      if (seen.insert(t).second) vocabulary_.push_back(t);
    }
  }
}

ModelCoherence CoherenceEvaluator::score(std::span<const std::vector<std::string>> topics, CoherenceMetric metric,
                                         std::span<const std::string> context) const {
  std::vector<std::vector<std::string>> truncated;
  truncated.reserve(topics.size());
  for (const auto& t : topics) {
    truncated.emplace_back(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(std::min(t.size(), cfg_.topn)));
  }
  std::vector<std::string> own_union;
  if (metric == CoherenceMetric::c_v && context.empty()) {
    if (cfg_.context_scope == ContextScope::full_vocabulary) {
      context = vocabulary_;
    } else {
      const std::vector<std::vector<std::vector<std::string>>> single_model{truncated};
      own_union = topic_union(single_model);
      context = own_union;
    }
  }
  ModelCoherence out;
  double sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t z = 0; z < truncated.size(); ++z) {
    if (truncated[z].size() < 2) {
      out.per_topic.push_back(std::numeric_limits<double>::quiet_NaN());
      out.absent_terms.push_back(0);
      out.skipped.push_back(z);
      continue;
    }
    const auto tc = metric == CoherenceMetric::c_v ? c_v(truncated[z], documents_, context, cfg_)
                                                   : c_npmi(truncated[z], windows_, cfg_.epsilon, cfg_.gamma);
    out.per_topic.push_back(tc.score);
    out.absent_terms.push_back(tc.absent_terms);
    sum += tc.score;
    ++scored;
  }
  out.mean = scored > 0 ? sum / static_cast<double>(scored) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

ModelCoherence model_coherence(std::span<const std::vector<std::string>> topics, CoherenceMetric metric,
                               const CoherenceEvaluator& evaluator, std::span<const std::string> context) {
  return evaluator.score(topics, metric, context);
}

}  // namespace stormtopics
