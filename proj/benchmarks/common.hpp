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

#pragma once

#include <random>

#include "tatec/scoring.hpp"
#include "tatec/training.hpp"

namespace tatec::bench {

inline Model filled_model(ModelKind kind, std::int32_t e, std::int32_t l,
                          std::size_t d1, std::size_t d2, std::uint64_t seed) {
  Rng rng(seed);
  Model m = init_params(kind == ModelKind::kTatecLc ? ModelKind::kTatecFt : kind,
                        d1, d2, e, l, rng);
  if (kind == ModelKind::kTatecLc)
    m = Model::combine(kind, m.bigram_part(), m.trigram_part(), 1.0);
  return m;
}

inline std::vector<Triple> random_triples(std::size_t n, std::int32_t e,
                                          std::int32_t l, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triple> out(n);
  for (auto& t : out)
    t = {uniform_index(rng, e), uniform_index(rng, l), uniform_index(rng, e)};
  return out;
}

}  // namespace tatec::bench
