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

constexpr std::int32_t kEntities = 15000;
constexpr std::int32_t kRelations = 1300;

// Single-triple scores at FB15k-like dimensions.
void BM_ScoreTriple(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto m = filled_model(kind, kEntities, kRelations, 100, 50, 1);
  const auto triples = random_triples(4096, kEntities, kRelations, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.score(triples[i++ & 4095]));
  }
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ScoreTriple)
    ->Arg(int(ModelKind::kBigram))
    ->Arg(int(ModelKind::kTrigram))
    ->Arg(int(ModelKind::kTatecFt))
    ->Arg(int(ModelKind::kTatecLc))
    ->Arg(int(ModelKind::kTransE));

// One ranking query: every entity as the tail.
void BM_ScoreAllTails(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto m = filled_model(kind, kEntities, kRelations, 100, 50, 3);
  std::vector<double> out(kEntities);
  std::int32_t h = 0;
  for (auto _ : state) {
    m.score_tails(h, h % kRelations, out);
    benchmark::DoNotOptimize(out.data());
    h = (h + 1) % kEntities;
  }
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations() * kEntities);
}
BENCHMARK(BM_ScoreAllTails)
    ->Arg(int(ModelKind::kBigram))
    ->Arg(int(ModelKind::kTrigram))
    ->Arg(int(ModelKind::kTatecFt))
    ->Arg(int(ModelKind::kTransE))
    ->Unit(benchmark::kMicrosecond);

void BM_PairGradient(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto m = filled_model(kind, kEntities, kRelations, 100, 50, 4);
  const auto pos = random_triples(1024, kEntities, kRelations, 5);
  const auto neg = random_triples(1024, kEntities, kRelations, 6);
  GradientBuffer g(m);
  std::size_t i = 0;
  for (auto _ : state) {
    grad_pair(m, pos[i & 1023], neg[i & 1023], 1e3, g);
    if ((++i & 255) == 0) g.clear();
  }
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PairGradient)
    ->Arg(int(ModelKind::kBigram))
    ->Arg(int(ModelKind::kTrigram))
    ->Arg(int(ModelKind::kTatecFt))
    ->Arg(int(ModelKind::kTransE));

}  // namespace
}  // namespace tatec::bench
