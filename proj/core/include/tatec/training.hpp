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
#include <optional>
#include <string>
#include <vector>

#include "tatec/eval.hpp"
#include "tatec/kbdata.hpp"
#include "tatec/scoring.hpp"

namespace tatec {

enum class RegularizationScheme { kHard, kSoft };

struct Regularization {
  RegularizationScheme scheme = RegularizationScheme::kSoft;
  double rho_e = 1.0;  // entity radius
  double rho_l = 1.0;  // relation-matrix radius
  double c1 = 0.0;     // bigram and TransE entities
  double c2 = 0.0;     // trigram entities and relation matrices
};

/// Where the negative of each training pair comes from.
enum class NegativeSource {
  kCorrupt,   // sample_corrupted() on the fly
  kObserved,  // the labeled negatives of a fully observed KB
};

struct TrainConfig {
  ModelKind model_kind = ModelKind::kBigram;
  std::size_t d1 = 10;
  std::size_t d2 = 10;
  double lambda1 = 0.01;
  double lambda2 = 0.01;
  double gamma = 1.0;
  std::size_t batch_size = 100;
  int epochs = 10;
  int negatives_per_positive = 1;
  CorruptionStrategy corruption = CorruptionStrategy::kHeadOrTail;
  NegativeSource negative_source = NegativeSource::kCorrupt;
  Regularization regularization;
  int validation_every = 10;
  ValidationMetric validation_metric = ValidationMetric::kFilteredMeanRank;
  std::size_t validation_sample = 0;  // 0 = whole validation set
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  // Linear combination.
  double alpha = 1.0;
  double epsilon = 1e-3;

  // Constituent configurations (preset names or config paths) for kinds
  // that start from pre-trained terms.
  std::string pretrain_bigram;
  std::string pretrain_trigram;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

// ---------------------------------------------------------------------------

/// Uniform(-6/sqrt(d), 6/sqrt(d)) for every block (d being the owning term's
/// dimension), then entity rows and relation matrices scaled to unit norm.
/// Relation vectors and the diagonal are left unnormalized.
Model init_params(ModelKind kind, std::size_t d1, std::size_t d2,
                  std::int32_t num_entities, std::int32_t num_relations,
                  Rng& rng);

/// Projects every entity row onto the rho_e ball and every relation matrix
/// onto the rho_l Frobenius ball. Relation vectors and D are never touched.
void apply_hard_projection(Model& model, double rho_e, double rho_l);

struct Penalty {
  double value = 0.0;
  GradientBuffer gradient;
};

/// C1 [||e1||^2 - rho_e^2]_+ + C2 ([||e2||^2 - rho_e^2]_+ +
/// [||R||_F^2 - rho_l^2]_+) summed over all entities and relations, with its
/// subgradient (2 C x for violating items).
Penalty soft_penalty_terms(const Model& model, double c1, double c2,
                           double rho_e, double rho_l);

/// Positives (replicated when pairing with observed negatives) and the
/// observed negatives, ready for epochs.
struct TrainingSet {
  TripleSet positives;
  std::optional<TripleSet> negatives;
};

TrainingSet make_training_set(const TripleSet& train, const TrainConfig& cfg,
                              Rng& rng);

struct EpochStats {
  double mean_hinge_loss = 0.0;
  double active_fraction = 0.0;
  std::size_t pairs = 0;
  std::size_t batches = 0;
};

/// Called after each minibatch update (and projection). Used by
/// instrumentation and tests.
using BatchObserver =
    std::function<void(const Model&, int epoch, std::size_t batch)>;

/// One pass over the shuffled positives in minibatches of cfg.batch_size;
/// summed pair subgradients are applied once per minibatch with lambda1 on
/// bigram-side blocks and lambda2 on trigram-side blocks, followed by the
/// regularization step. Throws DivergenceError on non-finite parameters.
EpochStats train_epoch(Model& model, const TrainingSet& data,
                       const TrainConfig& cfg, Rng& rng, int epoch = 1,
                       const BatchObserver& observer = {});

struct TracePoint {
  int epoch = 0;
  double metric = 0.0;
  double mean_hinge_loss = 0.0;
};

struct FitResult {
  Model model;  // best snapshot on validation
  std::vector<TracePoint> trace;
  int best_epoch = 0;
  double best_metric = 0.0;
};

struct FitOptions {
  /// Pre-trained starting point; required for tatec_ft.
  std::optional<Model> initial;
  /// Known positives for filtered validation ranking.
  const TripleSet* known = nullptr;
  BatchObserver observer;
  /// Called after each epoch with its statistics.
  std::function<void(int epoch, const EpochStats&)> on_epoch;
};

/// Trains for cfg.epochs epochs, validating at epoch 0 and every
/// cfg.validation_every epochs (and after the last one); returns the best
/// snapshot (the latest one on ties) and the full trace.
FitResult fit(const TrainConfig& cfg, const TripleSet& train,
              const TripleSet& valid, const FitOptions& options = {});

}  // namespace tatec
