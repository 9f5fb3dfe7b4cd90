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
#include <benchmark/benchmark.h>

#include <random>

#include "stormtopics/kmeans.hpp"

using namespace stormtopics;

namespace {

Matrix points(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Matrix m(n, dim);
  for (auto& v : m.values()) v = normal(rng);
  return m;
}

void BM_KMeansRun(benchmark::State& state, KMeansAlgorithm algo) {
  const Matrix pts = points(static_cast<std::size_t>(state.range(0)), 64);
  Rng rng(7);
  const Matrix init = kmeans_pp_init(pts, 9, rng).centroids;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans_run(pts, init, 300, 1e-8, algo).inertia);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_KMeansPlusPlus(benchmark::State& state) {
  const Matrix pts = points(static_cast<std::size_t>(state.range(0)), 64);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(kmeans_pp_init(pts, 15, rng).indices.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_KMeansRun, elkan, KMeansAlgorithm::elkan)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_KMeansRun, lloyd, KMeansAlgorithm::lloyd)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KMeansPlusPlus)->Arg(5000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
