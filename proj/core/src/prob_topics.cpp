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
#include "stormtopics/prob_topics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>

#include "stormtopics/embedding_io.hpp"
#include "stormtopics/error.hpp"
#include "stormtopics/io.hpp"

namespace stormtopics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t z = 1; z < scores.size(); ++z) {
    if (scores[z] > scores[best]) best = z;
  }
  return best;
}

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

std::unordered_map<std::string, std::uint32_t> index_of(std::span<const std::string> vocabulary) {
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) index.emplace(vocabulary[i], static_cast<std::uint32_t>(i));
  return index;
}

std::vector<std::uint32_t> known_ids(const Document& doc, const std::unordered_map<std::string, std::uint32_t>& index) {
  std::vector<std::uint32_t> ids;
  for (const auto& t : doc.tokens) {
    if (const auto it = index.find(t); it != index.end()) ids.push_back(it->second);
  }
  return ids;
}

nlohmann::json matrix_rows(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_rows(const nlohmann::json& j, std::size_t cols) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != cols) throw InputError("matrix row has " + std::to_string(r.size()) + " columns, expected " + std::to_string(cols));
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(flat));
}

void put_phi(nlohmann::json& j, const std::filesystem::path& path, const Matrix& phi, std::size_t threshold) {
  if (phi.cols() <= threshold) {
    j["phi"] = matrix_rows(phi);
    return;
  }
  const std::string raw = encode_f32(phi.values());
  std::filesystem::path sidecar = path;
  sidecar += ".phi.f32";
  write_file_atomic(sidecar, raw);
  j["phi_sidecar"] = {{"file", sidecar.filename().string()}, {"sha256", sha256_hex(raw)}};
}

Matrix get_phi(const nlohmann::json& j, const std::filesystem::path& path, std::size_t k, std::size_t v) {
  if (const auto it = j.find("phi"); it != j.end()) {
    auto phi = matrix_from_rows(*it, v);
    if (phi.rows() != k) throw InputError("phi has the wrong number of topics");
    return phi;
  }
  const auto& side = j.at("phi_sidecar");
  const auto raw = read_file(path.parent_path() / side.at("file").get<std::string>());
  if (sha256_hex(raw) != side.at("sha256").get<std::string>()) throw InputError("phi sidecar checksum mismatch");
  if (raw.size() != k * v * 4) throw InputError("phi sidecar has the wrong length");
  return Matrix(k, v, decode_f32(raw));
}

nlohmann::json parse_model_file(const std::filesystem::path& path, std::string_view kind) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (j.value("model", "") != kind) throw InputError(path.string() + ": not a " + std::string(kind) + " model");
  return j;
}

}  // namespace

// ---------------------------------------------------------------- LDA

std::vector<double> LdaModel::topic_proportions() const {
  const double total = std::accumulate(topic_counts.begin(), topic_counts.end(), 0.0);
  std::vector<double> p(k, 0.0);
  for (std::size_t z = 0; z < k; ++z) p[z] = total > 0 ? static_cast<double>(topic_counts[z]) / total : 1.0 / k;
  return p;
}

LdaSampler::LdaSampler(std::vector<std::vector<std::uint32_t>> docs, std::size_t vocab_size, std::size_t k,
                       double alpha, double beta, std::uint64_t seed)
    : docs_(std::move(docs)), vocab_size_(vocab_size), k_(k), alpha_(alpha), beta_(beta),
      n_dz_(docs_.size() * k, 0), n_zw_(k * vocab_size, 0), n_z_(k, 0), weights_(k), rng_(seed),
      min_mass_(kInf) {
  z_.resize(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    z_[d].resize(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const auto z = static_cast<std::uint32_t>(rng_.index(k_));
      z_[d][i] = z;
      ++n_dz_[d * k_ + z];
      ++n_zw_[z * vocab_size_ + docs_[d][i]];
      ++n_z_[z];
    }
  }
}

void LdaSampler::sweep() {
  const double vbeta = static_cast<double>(vocab_size_) * beta_;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const std::uint32_t w = docs_[d][i];
      std::uint32_t z = z_[d][i];
      --n_dz_[d * k_ + z];
      --n_zw_[z * vocab_size_ + w];
      --n_z_[z];
      double total = 0.0;
      for (std::size_t t = 0; t < k_; ++t) {
        weights_[t] = (static_cast<double>(n_dz_[d * k_ + t]) + alpha_) *
                      (static_cast<double>(n_zw_[t * vocab_size_ + w]) + beta_) /
                      (static_cast<double>(n_z_[t]) + vbeta);
        total += weights_[t];
      }
      finite_ = finite_ && std::isfinite(total);
      min_mass_ = std::min(min_mass_, total);
      assert(std::isfinite(total) && total > 0.0);
      z = static_cast<std::uint32_t>(rng_.categorical(weights_, total));
      z_[d][i] = z;
      ++n_dz_[d * k_ + z];
      ++n_zw_[z * vocab_size_ + w];
      ++n_z_[z];
    }
  }
}

bool LdaSampler::counts_consistent() const {
  std::vector<std::uint64_t> dz(n_dz_.size(), 0), zw(n_zw_.size(), 0), nz(k_, 0);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      ++dz[d * k_ + z_[d][i]];
      ++zw[z_[d][i] * vocab_size_ + docs_[d][i]];
      ++nz[z_[d][i]];
    }
  }
  if (dz != n_dz_ || zw != n_zw_ || nz != n_z_) return false;
  for (std::size_t z = 0; z < k_; ++z) {
    std::uint64_t row = 0;
    for (std::size_t w = 0; w < vocab_size_; ++w) row += n_zw_[z * vocab_size_ + w];
    if (row != n_z_[z]) return false;
  }
  return true;
}

LdaModel LdaSampler::estimate() const {
  LdaModel m;
  m.k = k_;
  m.alpha = alpha_;
  m.beta = beta_;
  m.phi = Matrix(k_, vocab_size_);
  const double vbeta = static_cast<double>(vocab_size_) * beta_;
  for (std::size_t z = 0; z < k_; ++z) {
    for (std::size_t w = 0; w < vocab_size_; ++w) {
      m.phi(z, w) = (static_cast<double>(n_zw_[z * vocab_size_ + w]) + beta_) / (static_cast<double>(n_z_[z]) + vbeta);
    }
  }
  m.theta = Matrix(docs_.size(), k_);
  const double kalpha = static_cast<double>(k_) * alpha_;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const double nd = static_cast<double>(docs_[d].size());
    for (std::size_t z = 0; z < k_; ++z) {
      m.theta(d, z) = (static_cast<double>(n_dz_[d * k_ + z]) + alpha_) / (nd + kalpha);
    }
  }
  m.topic_counts = n_z_;
  return m;
}

LdaModel lda_fit(std::span<const Document> docs, const LdaConfig& cfg) {
  if (cfg.k == 0) throw InputError("LDA needs at least one topic");
  if (docs.empty()) throw InputError("LDA needs a non-empty corpus");
  const auto vocab = Vocabulary::build(docs);
  if (vocab.size() == 0) throw InputError("LDA corpus contains no tokens");
  std::vector<std::vector<std::uint32_t>> encoded;
  encoded.reserve(docs.size());
  for (const auto& d : docs) encoded.push_back(vocab.encode(d.tokens));

  LdaSampler sampler(std::move(encoded), vocab.size(), cfg.k, cfg.resolved_alpha(), cfg.beta, cfg.seed);
  for (std::size_t s = 0; s < cfg.passes * cfg.iterations; ++s) sampler.sweep();
  LdaModel m = sampler.estimate();
  m.passes = cfg.passes;
  m.iterations = cfg.iterations;
  m.seed = cfg.seed;
  m.vocabulary = vocab.terms();
  for (const auto& d : docs) m.doc_ids.push_back(d.id);
  return m;
}

// ---------------------------------------------------------------- BTM

std::vector<Biterm> extract_biterms(std::span<const std::uint32_t> ids, std::size_t window) {
  if (window < 2) throw InputError("biterm window must be at least 2");
  std::vector<Biterm> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t stop = std::min(ids.size(), i + window);
    for (std::size_t j = i + 1; j < stop; ++j) {
      out.push_back({std::min(ids[i], ids[j]), std::max(ids[i], ids[j])});
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> extract_biterms(const Document& doc, std::size_t window) {
  if (window < 2) throw InputError("biterm window must be at least 2");
  std::vector<std::pair<std::string, std::string>> out;
  const auto& t = doc.tokens;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::size_t stop = std::min(t.size(), i + window);
    for (std::size_t j = i + 1; j < stop; ++j) out.emplace_back(std::min(t[i], t[j]), std::max(t[i], t[j]));
  }
  return out;
}

BtmSampler::BtmSampler(std::vector<Biterm> biterms, std::size_t vocab_size, std::size_t k, double alpha, double beta,
                       std::uint64_t seed)
    : biterms_(std::move(biterms)), vocab_size_(vocab_size), k_(k), alpha_(alpha), beta_(beta),
      n_zw_(k * vocab_size, 0), n_z_(k, 0), weights_(k), rng_(seed), min_mass_(kInf) {
  z_.resize(biterms_.size());
  for (std::size_t b = 0; b < biterms_.size(); ++b) {
    const auto z = static_cast<std::uint32_t>(rng_.index(k_));
    z_[b] = z;
    ++n_z_[z];
    ++n_zw_[z * vocab_size_ + biterms_[b].first];
    ++n_zw_[z * vocab_size_ + biterms_[b].second];
  }
}

void BtmSampler::sweep() {
  const double vbeta = static_cast<double>(vocab_size_) * beta_;
  for (std::size_t b = 0; b < biterms_.size(); ++b) {
    const auto [w1, w2] = biterms_[b];
    std::uint32_t z = z_[b];
    --n_z_[z];
    --n_zw_[z * vocab_size_ + w1];
    --n_zw_[z * vocab_size_ + w2];
    double total = 0.0;
    for (std::size_t t = 0; t < k_; ++t) {
      const double denom = 2.0 * static_cast<double>(n_z_[t]) + vbeta;
      weights_[t] = (static_cast<double>(n_z_[t]) + alpha_) * (static_cast<double>(n_zw_[t * vocab_size_ + w1]) + beta_) *
                    (static_cast<double>(n_zw_[t * vocab_size_ + w2]) + beta_) / (denom * denom);
      total += weights_[t];
    }
    finite_ = finite_ && std::isfinite(total);
    min_mass_ = std::min(min_mass_, total);
    assert(std::isfinite(total) && total > 0.0);
    z = static_cast<std::uint32_t>(rng_.categorical(weights_, total));
    z_[b] = z;
    ++n_z_[z];
    ++n_zw_[z * vocab_size_ + w1];
    ++n_zw_[z * vocab_size_ + w2];
  }
}

bool BtmSampler::counts_consistent() const {
  std::vector<std::uint64_t> zw(n_zw_.size(), 0), nz(k_, 0);
  for (std::size_t b = 0; b < biterms_.size(); ++b) {
    ++nz[z_[b]];
    ++zw[z_[b] * vocab_size_ + biterms_[b].first];
    ++zw[z_[b] * vocab_size_ + biterms_[b].second];
  }
  if (zw != n_zw_ || nz != n_z_) return false;
  std::uint64_t total = 0;
  for (std::size_t z = 0; z < k_; ++z) {
    std::uint64_t row = 0;
    for (std::size_t w = 0; w < vocab_size_; ++w) row += n_zw_[z * vocab_size_ + w];
    if (row != 2 * n_z_[z]) return false;
    total += n_z_[z];
  }
  return total == biterms_.size();
}

BtmModel BtmSampler::estimate() const {
  BtmModel m;
  m.k = k_;
  m.alpha = alpha_;
  m.beta = beta_;
  m.n_biterms = biterms_.size();
  m.topic_counts = n_z_;
  m.phi = Matrix(k_, vocab_size_);
  const double vbeta = static_cast<double>(vocab_size_) * beta_;
  for (std::size_t z = 0; z < k_; ++z) {
    const double denom = 2.0 * static_cast<double>(n_z_[z]) + vbeta;
    for (std::size_t w = 0; w < vocab_size_; ++w) {
      m.phi(z, w) = (static_cast<double>(n_zw_[z * vocab_size_ + w]) + beta_) / denom;
    }
  }
  m.tau.resize(k_);
  const double denom = static_cast<double>(biterms_.size()) + static_cast<double>(k_) * alpha_;
  for (std::size_t z = 0; z < k_; ++z) m.tau[z] = (static_cast<double>(n_z_[z]) + alpha_) / denom;
  return m;
}

BtmModel btm_fit(std::span<const Biterm> biterms, std::vector<std::string> vocabulary, const BtmConfig& cfg) {
  if (cfg.k == 0) throw InputError("BTM needs at least one topic");
  if (biterms.empty()) {
    throw InputError("BTM corpus has no biterms: every document has fewer than two tokens");
  }
  for (const auto& b : biterms) {
    if (b.second >= vocabulary.size()) throw InputError("biterm refers to a term outside the vocabulary");
  }
  BtmSampler sampler(std::vector<Biterm>(biterms.begin(), biterms.end()), vocabulary.size(), cfg.k,
                     cfg.resolved_alpha(), cfg.beta, cfg.seed);
  for (std::size_t s = 0; s < cfg.passes * cfg.iterations; ++s) sampler.sweep();
  BtmModel m = sampler.estimate();
  m.window = cfg.window;
  m.passes = cfg.passes;
  m.iterations = cfg.iterations;
  m.seed = cfg.seed;
  m.vocabulary = std::move(vocabulary);
  return m;
}

BtmModel btm_fit(std::span<const Document> docs, const BtmConfig& cfg) {
  if (docs.empty()) throw InputError("BTM needs a non-empty corpus");
  const auto vocab = Vocabulary::build(docs);
  std::vector<Biterm> biterms;
  for (const auto& d : docs) {
    const auto ids = vocab.encode(d.tokens);
    const auto bs = extract_biterms(ids, cfg.window);
    biterms.insert(biterms.end(), bs.begin(), bs.end());
  }
  return btm_fit(biterms, vocab.terms(), cfg);
}

// ---------------------------------------------------------------- assignment

TopicAssignment lda_assign(const LdaModel& model, const Document& doc) {
  const auto index = index_of(model.vocabulary);
  const auto pi = model.topic_proportions();
  std::vector<double> score(model.k, 0.0);
  std::vector<double> post(model.k);
  for (const auto w : known_ids(doc, index)) {
    double norm = 0.0;
    for (std::size_t z = 0; z < model.k; ++z) {
      post[z] = model.phi(z, w) * pi[z];
      norm += post[z];
    }
    if (norm <= 0.0) continue;
    for (std::size_t z = 0; z < model.k; ++z) score[z] += post[z] / norm;
  }
  if (all_zero(score)) return {0, true};
  return {argmax_lowest(score), false};
}

TopicAssignment btm_assign(const BtmModel& model, const Document& doc) {
  const auto index = index_of(model.vocabulary);
  const auto ids = known_ids(doc, index);
  std::vector<double> score(model.k, 0.0);
  if (ids.size() >= 2) {
    const auto biterms = extract_biterms(ids, std::max<std::size_t>(model.window, 2));
    std::vector<double> post(model.k);
    const double weight = 1.0 / static_cast<double>(biterms.size());
    for (const auto& b : biterms) {
      double norm = 0.0;
      for (std::size_t z = 0; z < model.k; ++z) {
        post[z] = model.tau[z] * model.phi(z, b.first) * model.phi(z, b.second);
        norm += post[z];
      }
      if (norm <= 0.0) continue;
      for (std::size_t z = 0; z < model.k; ++z) score[z] += weight * post[z] / norm;
    }
  }
  if (all_zero(score)) {
    for (const auto w : ids) {
      for (std::size_t z = 0; z < model.k; ++z) score[z] += model.phi(z, w);
    }
  }
  if (all_zero(score)) return {0, true};
  return {argmax_lowest(score), false};
}

namespace {

template <typename Model, typename Assign>
Clustering cluster_with(const Model& model, std::span<const Document> docs, ModelTag tag, Assign assign) {
  Clustering c;
  c.model_tag = tag;
  c.k = model.k;
  c.seed = model.seed;
  for (const auto& d : docs) {
    const auto a = assign(model, d);
    c.ids.push_back(d.id);
    c.labels.push_back(a.topic);
    if (a.degenerate) c.degenerate.push_back(d.id);
  }
  return c;
}

}  // namespace

Clustering lda_cluster(const LdaModel& model, std::span<const Document> docs) {
  return cluster_with(model, docs, ModelTag::lda, lda_assign);
}

Clustering btm_cluster(const BtmModel& model, std::span<const Document> docs) {
  return cluster_with(model, docs, ModelTag::btm, btm_assign);
}

std::vector<std::vector<std::size_t>> topic_top_words(const Matrix& phi, std::size_t m) {
  if (m == 0) throw InputError("number of top words must be positive");
  const std::size_t take = std::min(m, phi.cols());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t z = 0; z < phi.rows(); ++z) {
    std::vector<std::size_t> order(phi.cols());
    std::iota(order.begin(), order.end(), 0);
    const auto row = phi.row(z);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
    order.resize(take);
    out.push_back(std::move(order));
  }
  return out;
}

std::vector<std::vector<std::string>> topic_top_terms(const Matrix& phi, std::span<const std::string> vocabulary,
                                                      std::size_t m) {
  std::vector<std::vector<std::string>> out;
  for (const auto& ids : topic_top_words(phi, m)) {
    std::vector<std::string> terms;
    for (auto id : ids) terms.push_back(vocabulary[id]);
    out.push_back(std::move(terms));
  }
  return out;
}

// ---------------------------------------------------------------- persistence

void write_lda_model(const std::filesystem::path& path, const LdaModel& m, std::size_t sidecar_threshold) {
  nlohmann::json j = {{"model", "lda"},     {"k", m.k},
                      {"alpha", m.alpha},   {"beta", m.beta},
                      {"passes", m.passes}, {"iterations", m.iterations},
                      {"seed", m.seed},     {"vocabulary", m.vocabulary},
                      {"doc_ids", m.doc_ids}, {"topic_counts", m.topic_counts},
                      {"theta", matrix_rows(m.theta)}};
  put_phi(j, path, m.phi, sidecar_threshold);
  write_file_atomic(path, j.dump() + "\n");
}

LdaModel read_lda_model(const std::filesystem::path& path) {
  const auto j = parse_model_file(path, "lda");
  try {
    LdaModel m;
    m.k = j.at("k").get<std::size_t>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.passes = j.at("passes").get<std::size_t>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    m.topic_counts = j.at("topic_counts").get<std::vector<std::uint64_t>>();
    m.theta = matrix_from_rows(j.at("theta"), m.k);
    m.phi = get_phi(j, path, m.k, m.vocabulary.size());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_btm_model(const std::filesystem::path& path, const BtmModel& m, std::size_t sidecar_threshold) {
  nlohmann::json j = {{"model", "btm"},       {"k", m.k},
                      {"alpha", m.alpha},     {"beta", m.beta},
                      {"window", m.window},   {"passes", m.passes},
                      {"iterations", m.iterations}, {"seed", m.seed},
                      {"vocabulary", m.vocabulary}, {"tau", m.tau},
                      {"n_biterms", m.n_biterms},   {"topic_counts", m.topic_counts}};
  put_phi(j, path, m.phi, sidecar_threshold);
  write_file_atomic(path, j.dump() + "\n");
}

BtmModel read_btm_model(const std::filesystem::path& path) {
  const auto j = parse_model_file(path, "btm");
  try {
    BtmModel m;
    m.k = j.at("k").get<std::size_t>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.window = j.at("window").get<std::size_t>();
    m.passes = j.at("passes").get<std::size_t>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    m.tau = j.at("tau").get<std::vector<double>>();
    m.n_biterms = j.at("n_biterms").get<std::size_t>();
    m.topic_counts = j.at("topic_counts").get<std::vector<std::uint64_t>>();
    m.phi = get_phi(j, path, m.k, m.vocabulary.size());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace stormtopics
