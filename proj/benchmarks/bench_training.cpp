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

namespace tatec::bench {
namespace {

// One epoch of corrupted-negative training on a random KB.
void BM_TrainEpoch(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const std::int32_t e = 2000, l = 100;
  TrainConfig cfg;
  cfg.model_kind = kind;
  cfg.d1 = 50;
  cfg.d2 = 25;
  cfg.batch_size = 1000;
  cfg.regularization.c1 = cfg.regularization.c2 = 0.01;
  const TripleSet train(random_triples(20000, e, l, 1), e, l);
  Rng rng(2);
  const auto data = make_training_set(train, cfg, rng);
  Model m = filled_model(kind, e, l, cfg.d1, cfg.d2, 3);
  int epoch = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_epoch(m, data, cfg, rng, epoch++));
  }
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_TrainEpoch)
    ->Arg(int(ModelKind::kBigram))
    ->Arg(int(ModelKind::kTrigram))
    ->Arg(int(ModelKind::kTatecFt))
    ->Arg(int(ModelKind::kTransE))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tatec::bench

BENCHMARK_MAIN();
