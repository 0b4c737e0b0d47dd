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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tatec/eval.hpp"
#include "tatec/kbdata.hpp"
#include "tatec/lbfgs.hpp"
#include "tatec/scoring.hpp"

namespace tatec {

/// Frozen sub-scores of each triple; score_lc == <delta^l, f> exactly.
std::vector<Features> precompute_features(const BigramParams& bigram,
                                          const TrigramParams& trigram,
                                          std::span<const Triple> triples,
                                          std::size_t threads = 1);

/// One (positive, negative) training pair in feature space.
struct FeaturePair {
  std::int32_t pos_label = 0;
  std::int32_t neg_label = 0;
  Features pos{};
  Features neg{};
};

struct LcObjective {
  double value = 0.0;
  double hinge = 0.0;
  double penalty = 0.0;
  Matrix gradient;  // L x 4
};

/// sum over pairs [gamma - <delta, f_pos> + <delta, f_neg>]_+
///   + sum_l ||delta^l||^2 / (sigma_l + epsilon), with its subgradient.
LcObjective lc_objective(const Matrix& delta, std::span<const double> sigma,
                         std::span<const FeaturePair> pairs, double gamma,
                         double epsilon);

/// sigma_l = alpha ||delta^l|| / sum_k ||delta^k||; uniform alpha/L when all
/// rows are zero.
std::vector<double> update_sigma(const Matrix& delta, double alpha);

struct CombinationOptions {
  double alpha = 1.0;
  double gamma = 1.0;
  double epsilon = 1e-3;
  CorruptionStrategy corruption = CorruptionStrategy::kHeadOrTail;
  /// Pair replicated positives with the observed negatives of `train`
  /// instead of corrupting.
  bool observed_negatives = false;
  std::size_t max_outer_iterations = 50;
  double relative_tolerance = 1e-5;
  LbfgsOptions lbfgs;
  std::size_t threads = 1;
};

struct OuterIteration {
  int iteration = 0;
  double objective = 0.0;  // after the sigma update
  double validation = 0.0;
  bool accepted = true;
};

struct CombinationResult {
  CombinationWeights weights;  // best on validation
  std::vector<OuterIteration> trace;
  bool sigma_fallback = false;  // all delta rows collapsed to zero
};

/// Alternates L-BFGS over delta (sigma fixed) with the closed-form sigma
/// update, from delta = 1 and uniform sigma. Negative pairs are drawn once.
/// An outer iteration whose objective exceeds the previous one is rejected
/// and ends the loop. The constituents of `model` are never modified.
CombinationResult fit_combination(const Model& model, const TripleSet& train,
                                  const Validator& validator,
                                  const CombinationOptions& options, Rng& rng);

}  // namespace tatec
