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

#include "stormtopics/coherence.hpp"

using namespace stormtopics;

namespace {

std::vector<Document> corpus(std::size_t n_docs) {
  std::mt19937_64 rng(5);
  std::vector<Document> docs(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    docs[d].id = "d" + std::to_string(d);
    const std::size_t len = 5 + rng() % 15;
    for (std::size_t i = 0; i < len; ++i) docs[d].tokens.push_back("w" + std::to_string(rng() % 3000));
  }
  return docs;
}

std::vector<std::vector<std::string>> topics(std::size_t k) {
  std::mt19937_64 rng(6);
  std::vector<std::vector<std::string>> out(k);
  for (auto& t : out) {
    for (int i = 0; i < 10; ++i) t.push_back("w" + std::to_string(rng() % 300));
  }
  return out;
}

void BM_CountWindows(benchmark::State& state) {
  const auto docs = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(count_windows(docs, 10).n_contexts());
}

void BM_ModelScore(benchmark::State& state, CoherenceMetric metric) {
  const auto docs = corpus(5000);
  const CoherenceEvaluator ev(docs, {});
  const auto t = topics(15);
  for (auto _ : state) benchmark::DoNotOptimize(ev.score(t, metric).mean);
}

}  // namespace

BENCHMARK(BM_CountWindows)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ModelScore, cnpmi, CoherenceMetric::c_npmi)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_ModelScore, cv, CoherenceMetric::c_v)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
