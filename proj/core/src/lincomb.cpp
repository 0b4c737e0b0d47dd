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

#include "tatec/lincomb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tatec/errors.hpp"

namespace tatec {

namespace {

std::size_t idx(std::int32_t i) { return static_cast<std::size_t>(i); }

double feature_dot(std::span<const double> d, const Features& f) {
  return d[0] * f[0] + d[1] * f[1] + d[2] * f[2] + d[3] * f[3];
}

}  // namespace

std::vector<Features> precompute_features(const BigramParams& bigram,
                                          const TrigramParams& trigram,
                                          std::span<const Triple> triples,
                                          std::size_t threads) {
  std::vector<Features> out(triples.size());
  parallel_for(triples.size(), threads, [&](std::size_t i) {
    out[i] = lc_features(bigram, trigram, triples[i]);
  });
  return out;
}

LcObjective lc_objective(const Matrix& delta, std::span<const double> sigma,
                         std::span<const FeaturePair> pairs, double gamma,
                         double epsilon) {
  if (delta.cols() != kNumFeatures || sigma.size() != delta.rows())
    throw DomainError("lc_objective: delta must be L x 4 and sigma of size L");
  if (!(epsilon > 0.0)) throw DomainError("lc_objective: epsilon must be > 0");
  LcObjective out;
  out.gradient = Matrix(delta.rows(), kNumFeatures);
  for (const auto& p : pairs) {
    const double loss = gamma - feature_dot(delta.row(idx(p.pos_label)), p.pos) +
                        feature_dot(delta.row(idx(p.neg_label)), p.neg);
    if (loss <= 0.0) continue;
    out.hinge += loss;
    auto gp = out.gradient.row(idx(p.pos_label));
    for (std::size_t k = 0; k < kNumFeatures; ++k) gp[k] -= p.pos[k];
    auto gn = out.gradient.row(idx(p.neg_label));
    for (std::size_t k = 0; k < kNumFeatures; ++k) gn[k] += p.neg[k];
  }
  for (std::size_t l = 0; l < delta.rows(); ++l) {
    if (sigma[l] < 0.0) throw DomainError("lc_objective: negative sigma");
    const double w = 1.0 / (sigma[l] + epsilon);
    out.penalty += squared_norm(delta.row(l)) * w;
    axpy(2.0 * w, delta.row(l), out.gradient.row(l));
  }
  out.value = out.hinge + out.penalty;
  return out;
}

std::vector<double> update_sigma(const Matrix& delta, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
  const std::size_t l = delta.rows();
  std::vector<double> norms(l);
  for (std::size_t i = 0; i < l; ++i) norms[i] = norm(delta.row(i));
  const double total = std::accumulate(norms.begin(), norms.end(), 0.0);
  std::vector<double> sigma(l);
  if (total == 0.0) {
    std::fill(sigma.begin(), sigma.end(), alpha / static_cast<double>(l));
    return sigma;
  }
  for (std::size_t i = 0; i < l; ++i) sigma[i] = alpha * norms[i] / total;
  return sigma;
}

namespace {

bool all_zero(const Matrix& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](double v) { return v == 0.0; });
}

}  // namespace

CombinationResult fit_combination(const Model& model, const TripleSet& train,
                                  const Validator& validator,
                                  const CombinationOptions& options, Rng& rng) {
  if (model.kind() != ModelKind::kTatecLc)
    throw ConfigError("fit_combination needs a tatec_lc model");
  if (!(options.alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(options.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  const auto& bigram = model.bigram();
  const auto& trigram = model.trigram();
  const auto num_relations = idx(model.num_relations());

  // Training pairs, drawn once so the objective is deterministic.
  std::vector<Triple> pos_triples, neg_triples;
  if (options.observed_negatives) {
    if (!train.has_truth())
      throw ConfigError("observed negatives need a truth-labeled training set");
    const auto negatives = train.negatives();
    const auto positives = balance_positives(train.positives(), negatives, rng);
    std::vector<std::size_t> order(negatives.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < positives.size(); ++i) {
      pos_triples.push_back(positives[i]);
      neg_triples.push_back(negatives[order[i % order.size()]]);
    }
  } else {
    for (const auto& t : train.positives()) {
      pos_triples.push_back(t);
      neg_triples.push_back(sample_corrupted(t, options.corruption,
                                             model.num_entities(),
                                             model.num_relations(), rng));
    }
  }
  if (pos_triples.empty()) throw DomainError("no training pairs");
  const auto fpos =
      precompute_features(bigram, trigram, pos_triples, options.threads);
  const auto fneg =
      precompute_features(bigram, trigram, neg_triples, options.threads);
  std::vector<FeaturePair> pairs(pos_triples.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    pairs[i] = {pos_triples[i].label, neg_triples[i].label, fpos[i], fneg[i]};

  CombinationWeights current;
  current.delta = Matrix(num_relations, kNumFeatures, 1.0);
  current.alpha = options.alpha;
  current.epsilon = options.epsilon;
  current.sigma.assign(num_relations,
                       options.alpha / static_cast<double>(num_relations));

  Model scratch = model;
  auto validate = [&](const CombinationWeights& w) {
    scratch.weights() = w;
    return validator.evaluate(scratch);
  };
  auto objective_of = [&](const CombinationWeights& w) {
    const double v =
        lc_objective(w.delta, w.sigma, pairs, options.gamma, w.epsilon).value;
    if (!std::isfinite(v))
      throw DivergenceError(0, 0, "linear-combination objective is not finite");
    return v;
  };

  CombinationResult result;
  double previous = objective_of(current);
  double best_validation = validate(current);
  result.weights = current;
  result.trace.push_back({0, previous, best_validation, true});

  for (std::size_t it = 1; it <= options.max_outer_iterations; ++it) {
    // delta step, sigma fixed.
    const auto sigma = current.sigma;
    const Objective f = [&](std::span<const double> x, std::span<double> g) {
      Matrix d(num_relations, kNumFeatures);
      std::copy(x.begin(), x.end(), d.data().begin());
      auto o = lc_objective(d, sigma, pairs, options.gamma, options.epsilon);
      std::copy(o.gradient.data().begin(), o.gradient.data().end(), g.begin());
      return o.value;
    };
    const std::vector<double> x0(current.delta.data().begin(),
                                 current.delta.data().end());
    const auto lb = minimize_lbfgs(f, x0, options.lbfgs);
    if (!std::isfinite(lb.value))
      throw DivergenceError(static_cast<int>(it), 0,
                            "linear-combination objective is not finite");

    CombinationWeights next = current;
    std::copy(lb.x.begin(), lb.x.end(), next.delta.data().begin());
    if (all_zero(next.delta)) result.sigma_fallback = true;
    next.sigma = update_sigma(next.delta, options.alpha);
    double value = objective_of(next);
    bool accepted = true;
    if (value > previous + 1e-10 * std::max(1.0, std::fabs(previous))) {
      // The closed-form sigma ignores epsilon and can overshoot; keep the
      // delta step with the previous sigma and stop.
      next.sigma = current.sigma;
      value = lb.value;
      accepted = false;
    }
    current = std::move(next);
    const double v = validate(current);
    result.trace.push_back({static_cast<int>(it), value, v, accepted});
    if (validator.at_least_as_good(v, best_validation)) {
      best_validation = v;
      result.weights = current;
    }
    const double change =
        std::fabs(previous - value) / std::max(std::fabs(previous), 1e-300);
    previous = value;
    if (!accepted || change < options.relative_tolerance) break;
  }
  return result;
}

}  // namespace tatec
