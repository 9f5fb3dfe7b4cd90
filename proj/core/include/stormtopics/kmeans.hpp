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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stormtopics/clustering.hpp"
#include "stormtopics/matrix.hpp"
#include "stormtopics/random.hpp"

namespace stormtopics {

enum class KMeansAlgorithm { elkan, lloyd };

struct KMeansConfig {
  std::size_t k = 9;
  std::size_t n_init = 10;
  std::size_t max_iter = 300;
  // Relative tolerance: a run stops once the summed squared centroid shift
  // falls to tol times the mean per-feature variance of the data.
  double tol = 1e-4;
  std::uint64_t seed = 0;
  bool normalize = false;  // L2-normalize rows before clustering
  KMeansAlgorithm algorithm = KMeansAlgorithm::elkan;
};

struct SeedSelection {
  Matrix centroids;
  std::vector<std::size_t> indices;  // rows of points chosen, in order
};

// k-means++ seeding: first center uniform, each subsequent one drawn with
// probability proportional to the squared distance to the nearest chosen
// center (uniform again when every distance is zero).
SeedSelection kmeans_pp_init(const Matrix& points, std::size_t k, Rng& rng);

struct KMeansRun {
  std::vector<std::size_t> labels;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> inertia_history;  // after every assignment step
};

// Absolute shift threshold for a relative tol.
double absolute_tolerance(const Matrix& points, double tol);

// One run from the given centers. Convergence: labels unchanged, or summed
// squared centroid shift <= shift_threshold. A cluster left empty by an
// update seizes the point farthest from its own centroid (lowest index on
// ties) among clusters holding more than one point.
KMeansRun kmeans_run(const Matrix& points, Matrix initial, std::size_t max_iter,
                     double shift_threshold, KMeansAlgorithm algorithm);

// n_init seeded restarts; returns the run with least inertia (lowest
// restart index on ties). Throws InputError on non-finite input or k outside
// [1, n].
KMeansRun kmeans_fit(const Matrix& points, const KMeansConfig& cfg);

Clustering kmeans_cluster(const Matrix& points, std::span<const std::string> ids, const KMeansConfig& cfg,
                          ModelTag tag);

// Nearest centroid by Euclidean distance, lowest index on ties.
std::size_t predict(const Matrix& centroids, std::span<const double> point);
inline std::size_t predict(const Clustering& c, std::span<const double> point) {
  return predict(c.centroids, point);
}

Matrix l2_normalize_rows(const Matrix& points);

}  // namespace stormtopics
