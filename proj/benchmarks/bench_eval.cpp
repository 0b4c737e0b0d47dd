// Copyright 2026 The Tatec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "common.hpp"
#include "tatec/eval.hpp"

namespace tatec::bench {
namespace {

// Filtered link prediction over E candidates per side.
void BM_LinkPrediction(benchmark::State& state) {
  const auto e = static_cast<std::int32_t>(state.range(0));
  const std::int32_t l = 50;
  const auto m = filled_model(ModelKind::kTatecFt, e, l, 50, 25, 1);
  const ModelScorer scorer(m);
  const TripleSet known(random_triples(20 * std::size_t(e), e, l, 2), e, l);
  const TripleSet test(random_triples(100, e, l, 3), e, l);
  LinkPredictionOptions opt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_link_prediction(scorer, test, &known, opt));
  }
  state.SetItemsProcessed(state.iterations() * 2 * 100);
}
BENCHMARK(BM_LinkPrediction)->Arg(1000)->Arg(15000)->Unit(benchmark::kMillisecond);

// AUC-PR over a UMLS-sized labeled fold.
void BM_Classification(benchmark::State& state) {
  const std::int32_t e = 135, l = 46;
  const auto m = filled_model(ModelKind::kTrigram, e, l, 1, 40, 4);
  const ModelScorer scorer(m);
  auto triples = random_triples(std::size_t(state.range(0)), e, l, 5);
  std::vector<bool> truth(triples.size());
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = i % 100 == 0;
  const TripleSet test(triples, e, l, truth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_classification(scorer, test));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Classification)->Arg(1000)->Arg(84000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tatec::bench
