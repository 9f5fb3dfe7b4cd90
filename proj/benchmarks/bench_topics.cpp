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

#include "stormtopics/prob_topics.hpp"

using namespace stormtopics;

namespace {

// Tweet-sized documents over a Zipf-ish vocabulary.
std::vector<Document> corpus(std::size_t n_docs) {
  std::mt19937_64 rng(3);
  std::vector<double> weights(2000);
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> word(weights.begin(), weights.end());
  std::vector<Document> docs(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    docs[d].id = "d" + std::to_string(d);
    const std::size_t len = 5 + rng() % 15;
    for (std::size_t i = 0; i < len; ++i) docs[d].tokens.push_back("w" + std::to_string(word(rng)));
  }
  return docs;
}

void BM_LdaSweep(benchmark::State& state) {
  const auto docs = corpus(2000);
  const auto vocab = Vocabulary::build(docs);
  std::vector<std::vector<std::uint32_t>> enc;
  std::size_t tokens = 0;
  for (const auto& d : docs) {
    enc.push_back(vocab.encode(d.tokens));
    tokens += d.tokens.size();
  }
  const auto k = static_cast<std::size_t>(state.range(0));
  LdaSampler sampler(enc, vocab.size(), k, 50.0 / static_cast<double>(k), 0.01, 1);
  for (auto _ : state) sampler.sweep();
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tokens));
}

void BM_BtmSweep(benchmark::State& state) {
  const auto docs = corpus(2000);
  const auto vocab = Vocabulary::build(docs);
  std::vector<Biterm> biterms;
  for (const auto& d : docs) {
    const auto ids = vocab.encode(d.tokens);
    const auto b = extract_biterms(ids, 15);
    biterms.insert(biterms.end(), b.begin(), b.end());
  }
  const auto k = static_cast<std::size_t>(state.range(0));
  BtmSampler sampler(biterms, vocab.size(), k, 50.0 / static_cast<double>(k), 0.005, 1);
  for (auto _ : state) sampler.sweep();
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(biterms.size()));
}

}  // namespace

BENCHMARK(BM_LdaSweep)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BtmSweep)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
