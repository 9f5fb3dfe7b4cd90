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
#include "stormtopics/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "stormtopics/error.hpp"

namespace stormtopics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Matrix& points) {
  for (std::size_t i = 0; i < points.values().size(); ++i) {
    if (!std::isfinite(points.values()[i])) {
      throw InputError("non-finite value in row " + std::to_string(i / points.cols()));
    }
  }
}

std::size_t nearest(const Matrix& centers, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    const double d = squared_distance(x, centers.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double inertia_of(const Matrix& points, const Matrix& centers, const std::vector<std::size_t>& labels) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) sum += squared_distance(points.row(i), centers.row(labels[i]));
  return sum;
}

Matrix means_of(const Matrix& points, const std::vector<std::size_t>& labels, std::size_t k,
                std::vector<std::size_t>& counts) {
  Matrix sums(k, points.cols());
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto s = sums.row(labels[i]);
    const auto x = points.row(i);
    for (std::size_t d = 0; d < x.size(); ++d) s[d] += x[d];
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (auto& v : sums.row(c)) v /= static_cast<double>(counts[c]);
  }
  return sums;
}

// Recomputes centers from labels, repairing empty clusters in ascending
// order. Returns the indices of points that changed cluster.
std::vector<std::size_t> update_centers(const Matrix& points, std::vector<std::size_t>& labels,
                                        Matrix& centers) {
  const std::size_t k = centers.rows();
  std::vector<std::size_t> counts;
  centers = means_of(points, labels, k, counts);
  std::vector<std::size_t> moved;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = points.rows();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (counts[labels[i]] <= 1) continue;
      const double d = squared_distance(points.row(i), centers.row(labels[i]));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.rows()) break;  // fewer points than clusters
    labels[far] = c;
    moved.push_back(far);
    centers = means_of(points, labels, k, counts);
  }
  return moved;
}

class LloydAssigner {
 public:
  explicit LloydAssigner(const Matrix& points) : points_(points) {}

  void assign(const Matrix& centers, std::vector<std::size_t>& labels) {
    for (std::size_t i = 0; i < points_.rows(); ++i) labels[i] = nearest(centers, points_.row(i));
  }
  void centers_moved(const Matrix&, const Matrix&, const std::vector<std::size_t>&,
                     const std::vector<std::size_t>&) {}

 private:
  const Matrix& points_;
};

// Elkan's bounds: upper_[i] bounds the distance to the assigned center,
// lower_(i, c) bounds the distance to center c from below.
class ElkanAssigner {
 public:
  ElkanAssigner(const Matrix& points, std::size_t k)
      : points_(points), k_(k), upper_(points.rows(), kInf), lower_(points.rows(), k, 0.0),
        fresh_(true) {}

  void assign(const Matrix& centers, std::vector<std::size_t>& labels) {
    if (fresh_) {
      initial(centers, labels);
      fresh_ = false;
      return;
    }
    Matrix cc(k_, k_);
    std::vector<double> half_min(k_, kInf);
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = a + 1; b < k_; ++b) {
        const double d = std::sqrt(squared_distance(centers.row(a), centers.row(b)));
        cc(a, b) = cc(b, a) = d;
        half_min[a] = std::min(half_min[a], 0.5 * d);
        half_min[b] = std::min(half_min[b], 0.5 * d);
      }
    }
    for (std::size_t i = 0; i < points_.rows(); ++i) {
      std::size_t cur = labels[i];
      double u = upper_[i];
      if (u <= half_min[cur]) continue;
      bool stale = true;
      const auto x = points_.row(i);
      for (std::size_t c = 0; c < k_; ++c) {
        if (c == cur || u <= lower_(i, c) || u <= 0.5 * cc(cur, c)) continue;
        if (stale) {
          u = std::sqrt(squared_distance(x, centers.row(cur)));
          lower_(i, cur) = u;
          stale = false;
          if (u <= lower_(i, c) || u <= 0.5 * cc(cur, c)) continue;
        }
        const double d = std::sqrt(squared_distance(x, centers.row(c)));
        lower_(i, c) = d;
        if (d < u || (d == u && c < cur)) {
          cur = c;
          u = d;
        }
      }
      labels[i] = cur;
      upper_[i] = u;
    }
  }

  // Loosens the bounds by each center's displacement; points moved by the
  // empty-cluster repair lose their bounds entirely.
  void centers_moved(const Matrix& before, const Matrix& after, const std::vector<std::size_t>& labels,
                     const std::vector<std::size_t>& reassigned) {
    std::vector<double> shift(k_);
    for (std::size_t c = 0; c < k_; ++c) shift[c] = std::sqrt(squared_distance(before.row(c), after.row(c)));
    for (std::size_t i = 0; i < points_.rows(); ++i) {
      for (std::size_t c = 0; c < k_; ++c) lower_(i, c) = std::max(lower_(i, c) - shift[c], 0.0);
    }
    for (std::size_t i = 0; i < points_.rows(); ++i) upper_[i] += shift[labels[i]];
    for (std::size_t i : reassigned) {
      upper_[i] = kInf;
      for (std::size_t c = 0; c < k_; ++c) lower_(i, c) = 0.0;
    }
  }

 private:
  void initial(const Matrix& centers, std::vector<std::size_t>& labels) {
    for (std::size_t i = 0; i < points_.rows(); ++i) {
      const auto x = points_.row(i);
      std::size_t best = 0;
      double best_d = kInf;
      for (std::size_t c = 0; c < k_; ++c) {
        const double d = std::sqrt(squared_distance(x, centers.row(c)));
        lower_(i, c) = d;
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[i] = best;
      upper_[i] = best_d;
    }
  }

  const Matrix& points_;
  std::size_t k_;
  std::vector<double> upper_;
  Matrix lower_;
  bool fresh_;
};

template <typename Assigner>
KMeansRun run_with(Assigner& assigner, const Matrix& points, Matrix centers, std::size_t max_iter,
                   double shift_threshold) {
  KMeansRun run;
  std::vector<std::size_t> labels(points.rows(), 0);
  assigner.assign(centers, labels);
  run.inertia_history.push_back(inertia_of(points, centers, labels));
  for (std::size_t it = 0; it < max_iter; ++it) {
    Matrix updated = centers;
    const auto moved = update_centers(points, labels, updated);
    double shift = 0.0;
    for (std::size_t c = 0; c < centers.rows(); ++c) shift += squared_distance(centers.row(c), updated.row(c));
    assigner.centers_moved(centers, updated, labels, moved);
    centers = std::move(updated);

    std::vector<std::size_t> next = labels;
    assigner.assign(centers, next);
    run.inertia_history.push_back(inertia_of(points, centers, next));
    ++run.iterations;
    const bool unchanged = next == labels;
    labels = std::move(next);
    if (unchanged || shift <= shift_threshold) {
      run.converged = true;
      break;
    }
  }
  run.inertia = inertia_of(points, centers, labels);
  run.labels = std::move(labels);
  run.centroids = std::move(centers);
  return run;
}

}  // namespace

Matrix l2_normalize_rows(const Matrix& points) {
  Matrix out = points;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& v : row) v /= norm;
    }
  }
  return out;
}

SeedSelection kmeans_pp_init(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  if (k == 0) throw InputError("k must be positive");
  if (k > n) throw InputError("k=" + std::to_string(k) + " exceeds the " + std::to_string(n) + " points");
  SeedSelection sel;
  sel.centroids = Matrix(k, points.cols());
  std::vector<double> d2(n, kInf);
  std::size_t chosen = rng.index(n);
  for (std::size_t c = 0;; ++c) {
    sel.indices.push_back(chosen);
    std::ranges::copy(points.row(chosen), sel.centroids.row(c).begin());
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(chosen)));
      total += d2[i];
    }
    chosen = total > 0.0 ? rng.categorical(d2, total) : rng.index(n);
  }
  return sel;
}

double absolute_tolerance(const Matrix& points, double tol) {
  if (tol == 0.0 || points.rows() == 0) return 0.0;
  const double n = static_cast<double>(points.rows());
  double var_sum = 0.0;
  for (std::size_t d = 0; d < points.cols(); ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) mean += points(i, d);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) var += (points(i, d) - mean) * (points(i, d) - mean);
    var_sum += var / n;
  }
  return tol * var_sum / static_cast<double>(points.cols());
}

KMeansRun kmeans_run(const Matrix& points, Matrix initial, std::size_t max_iter, double shift_threshold,
                     KMeansAlgorithm algorithm) {
  if (initial.cols() != points.cols()) throw InputError("initial centers have the wrong dimension");
  if (algorithm == KMeansAlgorithm::lloyd) {
    LloydAssigner a(points);
    return run_with(a, points, std::move(initial), max_iter, shift_threshold);
  }
  ElkanAssigner a(points, initial.rows());
  return run_with(a, points, std::move(initial), max_iter, shift_threshold);
}

KMeansRun kmeans_fit(const Matrix& raw, const KMeansConfig& cfg) {
  require_finite(raw);
  if (cfg.n_init < 1) throw InputError("n_init must be at least 1");
  if (cfg.tol < 0.0) throw InputError("tol must be non-negative");
  const Matrix points = cfg.normalize ? l2_normalize_rows(raw) : raw;
  if (cfg.k == 0 || cfg.k > points.rows()) {
    throw InputError("k=" + std::to_string(cfg.k) + " must lie in [1, " + std::to_string(points.rows()) + "]");
  }
  const double threshold = absolute_tolerance(points, cfg.tol);

  auto one = [&](std::size_t restart) {
    Rng rng(Rng::derive(cfg.seed, restart));
    auto seeds = kmeans_pp_init(points, cfg.k, rng);
    return kmeans_run(points, std::move(seeds.centroids), cfg.max_iter, threshold, cfg.algorithm);
  };
  std::vector<std::future<KMeansRun>> pending;
  for (std::size_t r = 0; r < cfg.n_init; ++r) pending.push_back(std::async(std::launch::async, one, r));
  std::vector<KMeansRun> runs;
  for (auto& f : pending) runs.push_back(f.get());

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return std::move(runs[best]);
}

Clustering kmeans_cluster(const Matrix& points, std::span<const std::string> ids, const KMeansConfig& cfg,
                          ModelTag tag) {
  if (ids.size() != points.rows()) throw InputError("one id per point required");
  auto run = kmeans_fit(points, cfg);
  Clustering c;
  c.model_tag = tag;
  c.k = cfg.k;
  c.ids.assign(ids.begin(), ids.end());
  c.labels = std::move(run.labels);
  c.centroids = std::move(run.centroids);
  c.inertia = run.inertia;
  c.seed = cfg.seed;
  return c;
}

std::size_t predict(const Matrix& centroids, std::span<const double> point) {
  if (centroids.empty()) throw InputError("clustering has no centroids");
  if (point.size() != centroids.cols()) {
    throw InputError("point has dimension " + std::to_string(point.size()) + ", centroids have " +
                     std::to_string(centroids.cols()));
  }
  return nearest(centroids, point);
}

}  // namespace stormtopics
