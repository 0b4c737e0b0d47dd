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

#include "tatec/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tatec/errors.hpp"

namespace tatec {

namespace {

std::size_t idx(std::int32_t i) { return static_cast<std::size_t>(i); }

constexpr Block kAllBlocks[] = {
    Block::kBigramEntity,  Block::kHeadRelation,   Block::kTailRelation,
    Block::kDiagonal,      Block::kTrigramEntity,  Block::kRelationMatrix,
    Block::kTransEEntity,  Block::kTransERelation,
};

// Norm-constrained items: (block, radius, penalty weight).
struct Constraint {
  Block block;
  double radius;
  double weight;
};

std::vector<Constraint> constraints(const Model& model, double c1, double c2,
                                    double rho_e, double rho_l) {
  std::vector<Constraint> out;
  if (model.has_block(Block::kBigramEntity))
    out.push_back({Block::kBigramEntity, rho_e, c1});
  if (model.has_trigram())
    // Shared tables receive both entity penalties.
    out.push_back({model.resolve(Block::kTrigramEntity), rho_e, c2});
  if (model.has_block(Block::kRelationMatrix))
    out.push_back({Block::kRelationMatrix, rho_l, c2});
  if (model.has_block(Block::kTransEEntity))
    out.push_back({Block::kTransEEntity, rho_e, c1});
  return out;
}

// Adds 2 C x to the gradient of every touched row violating its radius.
void add_soft_penalty(const Model& model, const Regularization& reg,
                      GradientBuffer& grad) {
  for (const auto& c : constraints(model, reg.c1, reg.c2, reg.rho_e,
                                   reg.rho_l)) {
    if (c.weight == 0.0) continue;
    const auto& m = model.block(c.block);
    const std::vector<std::int32_t> rows(grad.touched(c.block).begin(),
                                         grad.touched(c.block).end());
    for (auto r : rows) {
      const auto x = m.row(idx(r));
      if (squared_norm(x) > c.radius * c.radius)
        axpy(2.0 * c.weight, x, grad.row(c.block, idx(r)));
    }
  }
}

// Registers every row a triple references in penalized blocks, so the soft
// penalty reaches items whose hinge was inactive.
void touch_referenced(const Model& model, const Triple& t,
                      GradientBuffer& grad) {
  if (model.has_block(Block::kBigramEntity)) {
    grad.row(Block::kBigramEntity, idx(t.head));
    grad.row(Block::kBigramEntity, idx(t.tail));
  }
  if (model.has_block(Block::kTrigramEntity)) {
    grad.row(Block::kTrigramEntity, idx(t.head));
    grad.row(Block::kTrigramEntity, idx(t.tail));
  }
  if (model.has_block(Block::kRelationMatrix))
    grad.row(Block::kRelationMatrix, idx(t.label));
  if (model.has_block(Block::kTransEEntity)) {
    grad.row(Block::kTransEEntity, idx(t.head));
    grad.row(Block::kTransEEntity, idx(t.tail));
  }
}

void project_touched(Model& model, const Regularization& reg,
                     const GradientBuffer& grad) {
  for (const auto& c : constraints(model, 0, 0, reg.rho_e, reg.rho_l)) {
    auto& m = model.block(c.block);
    for (auto r : grad.touched(c.block)) project_to_ball(m.row(idx(r)), c.radius);
  }
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (model_kind == ModelKind::kTatecFtShared && d1 != d2)
    fail("tatec_ft_shared requires d1 == d2");
  if (model_kind != ModelKind::kTrigram && d1 < 1) fail("d1 must be >= 1");
  if (model_kind != ModelKind::kBigram && model_kind != ModelKind::kTransE &&
      d2 < 1)
    fail("d2 must be >= 1");
  if (!(lambda1 > 0.0)) fail("lambda1 must be > 0");
  if (!(lambda2 > 0.0)) fail("lambda2 must be > 0");
  if (!(gamma > 0.0)) fail("gamma must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (epochs < 0) fail("epochs must be >= 0");
  if (negatives_per_positive < 1 || negatives_per_positive > 2)
    fail("negatives_per_positive must be 1 or 2");
  if (!(regularization.rho_e > 0.0)) fail("rho_e must be > 0");
  if (!(regularization.rho_l > 0.0)) fail("rho_l must be > 0");
  if (regularization.c1 < 0.0) fail("c1 must be >= 0");
  if (regularization.c2 < 0.0) fail("c2 must be >= 0");
  if (validation_every < 1) fail("validation_every must be >= 1");
  if (!(alpha > 0.0)) fail("alpha must be > 0");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (threads < 1) fail("threads must be >= 1");
}

Model init_params(ModelKind kind, std::size_t d1, std::size_t d2,
                  std::int32_t num_entities, std::int32_t num_relations,
                  Rng& rng) {
  Model model = Model::zeros(kind, num_entities, num_relations, d1, d2);
  for (auto b : kAllBlocks) {
    if (!model.has_block(b)) continue;
    const double d =
        static_cast<double>(is_bigram_side(b) ? model.d1() : model.d2());
    const double bound = 6.0 / std::sqrt(d);
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (double& v : model.block(b).data()) v = uniform(rng);
  }
  for (auto b : kAllBlocks) {
    if (!model.has_block(b) ||
        !(is_entity_block(b) || b == Block::kRelationMatrix))
      continue;
    auto& m = model.block(b);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double n = norm(m.row(r));
      if (n > 0.0) scale(1.0 / n, m.row(r));
    }
  }
  return model;
}

void apply_hard_projection(Model& model, double rho_e, double rho_l) {
  for (const auto& c : constraints(model, 0, 0, rho_e, rho_l)) {
    auto& m = model.block(c.block);
    for (std::size_t r = 0; r < m.rows(); ++r)
      project_to_ball(m.row(r), c.radius);
  }
}

Penalty soft_penalty_terms(const Model& model, double c1, double c2,
                           double rho_e, double rho_l) {
  Penalty p{0.0, GradientBuffer(model)};
  for (const auto& c : constraints(model, c1, c2, rho_e, rho_l)) {
    if (c.weight == 0.0) continue;
    const auto& m = model.block(c.block);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double excess = squared_norm(m.row(r)) - c.radius * c.radius;
      if (excess <= 0.0) continue;
      p.value += c.weight * excess;
      axpy(2.0 * c.weight, m.row(r), p.gradient.row(c.block, r));
    }
  }
  return p;
}

TrainingSet make_training_set(const TripleSet& train, const TrainConfig& cfg,
                              Rng& rng) {
  TrainingSet out;
  if (cfg.negative_source == NegativeSource::kObserved) {
    if (!train.has_truth())
      throw ConfigError(
          "negatives = observed needs a truth-labeled training set");
    auto negatives = train.negatives();
    out.positives = balance_positives(train.positives(), negatives, rng);
    out.negatives = std::move(negatives);
  } else {
    out.positives = train.positives();
    if (out.positives.empty()) throw DomainError("no positive training triples");
  }
  return out;
}

EpochStats train_epoch(Model& model, const TrainingSet& data,
                       const TrainConfig& cfg, Rng& rng, int epoch,
                       const BatchObserver& observer) {
  const auto& positives = data.positives;
  const std::size_t n = positives.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> neg_order;
  if (data.negatives) {
    neg_order.resize(data.negatives->size());
    std::iota(neg_order.begin(), neg_order.end(), 0);
    std::shuffle(neg_order.begin(), neg_order.end(), rng);
  }

  const auto& reg = cfg.regularization;
  const bool soft = reg.scheme == RegularizationScheme::kSoft &&
                    (reg.c1 > 0.0 || reg.c2 > 0.0);
  const bool hard = reg.scheme == RegularizationScheme::kHard;
  const int per_positive = data.negatives ? 1 : cfg.negatives_per_positive;

  GradientBuffer grad(model);
  EpochStats stats;
  double total_loss = 0.0;
  std::size_t active = 0;

  for (std::size_t start = 0; start < n; start += cfg.batch_size) {
    const std::size_t stop = std::min(n, start + cfg.batch_size);
    grad.clear();
    for (std::size_t i = start; i < stop; ++i) {
      const Triple& pos = positives[order[i]];
      for (int k = 0; k < per_positive; ++k) {
        const Triple neg =
            data.negatives
                ? (*data.negatives)[neg_order[i % neg_order.size()]]
                : sample_corrupted(pos, cfg.corruption, model.num_entities(),
                                   model.num_relations(), rng);
        const double loss = grad_pair(model, pos, neg, cfg.gamma, grad);
        total_loss += loss;
        active += loss > 0.0;
        ++stats.pairs;
        if (soft) {
          touch_referenced(model, pos, grad);
          touch_referenced(model, neg, grad);
        }
      }
    }
    if (soft) add_soft_penalty(model, reg, grad);

    for (auto b : kAllBlocks) {
      if (!model.has_block(b)) continue;
      const double lr = is_bigram_side(b) ? cfg.lambda1 : cfg.lambda2;
      auto& m = model.block(b);
      for (auto r : grad.touched(b)) {
        auto row = m.row(idx(r));
        axpy(-lr, grad.find(b, idx(r)), row);
        if (!all_finite(row))
          throw DivergenceError(epoch, stats.batches,
                                std::string(to_string(b)) + " row " +
                                    std::to_string(r));
      }
    }
    if (hard) project_touched(model, reg, grad);
    if (observer) observer(model, epoch, stats.batches);
    ++stats.batches;
  }
  if (stats.pairs > 0) {
    stats.mean_hinge_loss = total_loss / static_cast<double>(stats.pairs);
    stats.active_fraction =
        static_cast<double>(active) / static_cast<double>(stats.pairs);
  }
  return stats;
}

FitResult fit(const TrainConfig& cfg, const TripleSet& train,
              const TripleSet& valid, const FitOptions& options) {
  cfg.validate();
  if (cfg.model_kind == ModelKind::kTatecLc)
    throw ConfigError("tatec_lc weights are fitted by fit_combination()");
  Rng rng(cfg.seed);

  Model model;
  if (options.initial) {
    model = *options.initial;
    if (model.kind() != cfg.model_kind)
      throw ConfigError("initial parameters are a " +
                        std::string(to_string(model.kind())) +
                        " model, config asks for " +
                        std::string(to_string(cfg.model_kind)));
    if (model.num_entities() != train.num_entities() ||
        model.num_relations() != train.num_relations())
      throw ConfigError("initial parameters do not match the vocabulary");
  } else if (cfg.model_kind == ModelKind::kTatecFt) {
    throw ConfigError(
        "tatec_ft starts from pre-trained bigram and trigram parameters");
  } else {
    model = init_params(cfg.model_kind, cfg.d1, cfg.d2, train.num_entities(),
                        train.num_relations(), rng);
  }

  const TrainingSet data = make_training_set(train, cfg, rng);
  const Validator validator(valid, cfg.validation_metric,
                            cfg.validation_sample, options.known, rng,
                            cfg.threads);

  FitResult result;
  result.best_metric = validator.evaluate(model);
  result.trace.push_back({0, result.best_metric, 0.0});
  result.model = model;

  if (cfg.epochs > 0 &&
      cfg.regularization.scheme == RegularizationScheme::kHard)
    apply_hard_projection(model, cfg.regularization.rho_e,
                          cfg.regularization.rho_l);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto stats =
        train_epoch(model, data, cfg, rng, epoch, options.observer);
    if (options.on_epoch) options.on_epoch(epoch, stats);
    if (epoch % cfg.validation_every != 0 && epoch != cfg.epochs) continue;
    const double metric = validator.evaluate(model);
    result.trace.push_back({epoch, metric, stats.mean_hinge_loss});
    if (validator.at_least_as_good(metric, result.best_metric)) {
      result.best_metric = metric;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

}  // namespace tatec
