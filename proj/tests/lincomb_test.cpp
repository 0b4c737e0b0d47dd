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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"
#include "tatec/lincomb.hpp"

namespace tatec {
namespace {

using testing::random_kb;
using testing::random_model;
using testing::random_triple;

std::vector<FeaturePair> random_pairs(std::size_t n, std::int32_t l, Rng& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<FeaturePair> out(n);
  for (auto& p : out) {
    p.pos_label = uniform_index(rng, l);
    p.neg_label = uniform_index(rng, l);
    for (auto& v : p.pos) v = u(rng);
    for (auto& v : p.neg) v = u(rng);
  }
  return out;
}

double sum(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

TEST(Features, MatchScoringSubTerms) {
  Rng rng(1);
  const auto m = random_model(ModelKind::kTatecFt, 8, 3, 4, 5, rng);
  std::vector<Triple> triples;
  for (int i = 0; i < 200; ++i) triples.push_back(random_triple(8, 3, rng));
  const auto f = precompute_features(m.bigram(), m.trigram(), triples, 2);
  ASSERT_EQ(f.size(), triples.size());
  const auto& b = m.bigram();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    const auto eh = b.entities.row(std::size_t(t.head));
    const auto et = b.entities.row(std::size_t(t.tail));
    EXPECT_EQ(f[i][0], dot(b.head_relations.row(std::size_t(t.label)), eh));
    EXPECT_EQ(f[i][1], dot(b.tail_relations.row(std::size_t(t.label)), et));
    EXPECT_NEAR(f[i][2], diagonal_form(eh, b.diagonal.row(0), et), 1e-12);
    EXPECT_NEAR(f[i][3], score_trigram(m.trigram(), t), 1e-12);
    const double ft = score_ft(m.bigram(), m.trigram(), t);
    EXPECT_NEAR(f[i][0] + f[i][1] + f[i][2] + f[i][3], ft,
                1e-12 * std::max(1.0, std::abs(ft)));
  }
  const auto z = Model::zeros(ModelKind::kTatecFt, 8, 3, 4, 5);
  for (const auto& v : precompute_features(z.bigram(), z.trigram(), triples))
    for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(LcObjective, ZeroWeightsCostOnePerPair) {
  Rng rng(2);
  const auto pairs = random_pairs(37, 4, rng);
  const Matrix delta(4, 4);
  const std::vector<double> sigma(4, 0.25);
  const auto o = lc_objective(delta, sigma, pairs, 1.0, 1e-3);
  EXPECT_EQ(o.value, 37.0);
  EXPECT_EQ(o.penalty, 0.0);
}

TEST(LcObjective, PenaltyHandExample) {
  Matrix delta(1, 4);
  delta(0, 0) = 1.0;
  const std::vector<double> sigma{1.0};
  const auto o = lc_objective(delta, sigma, {}, 1.0, 0.01);
  EXPECT_DOUBLE_EQ(o.penalty, 1.0 / 1.01);
  EXPECT_DOUBLE_EQ(o.value, 1.0 / 1.01);
  EXPECT_DOUBLE_EQ(o.gradient(0, 0), 2.0 / 1.01);
}

TEST(LcObjective, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int32_t l = 3;
    const auto pairs = random_pairs(25, l, rng);
    Matrix delta(l, 4);
    for (double& v : delta.data()) v = u(rng);
    std::vector<double> sigma{0.2, 0.5, 1.3};
    const double gamma = 0.7, eps = 1e-3, h = 1e-6;
    const auto o = lc_objective(delta, sigma, pairs, gamma, eps);
    for (std::size_t i = 0; i < delta.data().size(); ++i) {
      const double saved = delta.data()[i];
      delta.data()[i] = saved + h;
      const double up = lc_objective(delta, sigma, pairs, gamma, eps).value;
      delta.data()[i] = saved - h;
      const double down = lc_objective(delta, sigma, pairs, gamma, eps).value;
      delta.data()[i] = saved;
      const double numeric = (up - down) / (2 * h);
      // One-sided slopes differ at a hinge kink; skip those coordinates.
      delta.data()[i] = saved + 2 * h;
      const double up2 = lc_objective(delta, sigma, pairs, gamma, eps).value;
      delta.data()[i] = saved;
      if (std::abs((up2 - up) - (up - o.value)) > 1e-9) continue;
      const double analytic = o.gradient.data()[i];
      EXPECT_LE(std::abs(analytic - numeric),
                1e-4 * std::max(std::abs(analytic), std::abs(numeric)) + 1e-8);
    }
  }
}

TEST(UpdateSigma, HandExample) {
  Matrix delta(2, 4);
  delta(0, 0) = 3.0;
  delta(1, 2) = -1.0;
  const auto s = update_sigma(delta, 4.0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0], 3.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(UpdateSigma, EqualNormsGiveUniformAllocation) {
  Matrix delta(5, 4);
  for (std::size_t l = 0; l < 5; ++l) delta(l, l % 4) = l % 2 ? 2.0 : -2.0;
  for (double s : update_sigma(delta, 10.0)) EXPECT_DOUBLE_EQ(s, 2.0);
}

TEST(UpdateSigma, SumsToAlphaAndMatchesClosedForm) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> a(0.1, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t l = 1 + std::size_t(uniform_index(rng, 40));
    Matrix delta(l, 4);
    for (double& v : delta.data()) v = u(rng);
    const double alpha = a(rng);
    const auto s = update_sigma(delta, alpha);
    EXPECT_LE(std::abs(sum(s) - alpha), 1e-10 * alpha);
    double total = 0.0;
    for (std::size_t r = 0; r < l; ++r) total += std::sqrt(dot(delta.row(r), delta.row(r)));
    for (std::size_t r = 0; r < l; ++r) {
      EXPECT_GE(s[r], 0.0);
      EXPECT_NEAR(s[r], alpha * std::sqrt(dot(delta.row(r), delta.row(r))) / total,
                  1e-12 * alpha);
    }
  }
}

TEST(UpdateSigma, AllZeroFallsBackToUniform) {
  const Matrix delta(4, 4);
  for (double s : update_sigma(delta, 2.0)) EXPECT_EQ(s, 0.5);
}

// ---------------------------------------------------------------------------

struct SmallProblem {
  Model model;
  TripleSet train, valid;
};

// Constituents trained briefly on a random KB so the features are
// informative.
SmallProblem small_problem(std::uint64_t seed) {
  Rng rng(seed);
  auto kb = random_kb(20, 4, 160, rng);
  std::vector<Triple> tr, va;
  for (std::size_t i = 0; i < kb.size(); ++i)
    (i % 5 == 0 ? va : tr).push_back(kb[i]);
  TripleSet train(tr, 20, 4), valid(va, 20, 4);
  auto b = random_model(ModelKind::kBigram, 20, 4, 4, 0, rng, 0.5);
  auto t = random_model(ModelKind::kTrigram, 20, 4, 0, 4, rng, 0.5);
  return {Model::combine(ModelKind::kTatecLc, b, t, 1.0, 1e-3), train, valid};
}

TEST(FitCombination, ObjectiveIsNonIncreasingAndSigmaSumsToAlpha) {
  for (std::uint64_t seed : {5, 6, 7}) {
    auto p = small_problem(seed);
    Rng rng(seed);
    const Validator v(p.valid, ValidationMetric::kRawMeanRank, 0, nullptr, rng);
    CombinationOptions opt;
    opt.alpha = 10.0;
    opt.gamma = 1.0;
    const Model before = p.model;
    const auto r = fit_combination(p.model, p.train, v, opt, rng);
    EXPECT_EQ(p.model, before);
    ASSERT_FALSE(r.trace.empty());
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& it : r.trace) {
      if (!it.accepted) continue;
      EXPECT_LE(it.objective, prev + 1e-10);
      prev = it.objective;
    }
    EXPECT_LE(std::abs(sum(r.weights.sigma) - opt.alpha), 1e-8 * opt.alpha);
    for (double s : r.weights.sigma) EXPECT_GE(s, 0.0);
    EXPECT_EQ(r.weights.alpha, opt.alpha);
  }
}

TEST(FitCombination, BeatsOrMatchesUniformWeightsOnTraining) {
  auto p = small_problem(8);
  Rng rng(8);
  const Validator v(p.train, ValidationMetric::kRawMeanRank, 0, nullptr, rng);
  CombinationOptions opt;
  opt.alpha = 1e6;  // nearly unpenalized
  const auto r = fit_combination(p.model, p.train, v, opt, rng);
  Model fitted = p.model;
  fitted.weights() = r.weights;
  EXPECT_LE(v.evaluate(fitted), v.evaluate(p.model) + 1e-9);
}

TEST(FitCombination, SameSeedSameWeights) {
  auto p = small_problem(9);
  CombinationOptions opt;
  opt.alpha = 5.0;
  Rng r1(3), r2(3);
  const Validator v1(p.valid, ValidationMetric::kRawMeanRank, 0, nullptr, r1);
  const Validator v2(p.valid, ValidationMetric::kRawMeanRank, 0, nullptr, r2);
  EXPECT_EQ(fit_combination(p.model, p.train, v1, opt, r1).weights,
            fit_combination(p.model, p.train, v2, opt, r2).weights);
}

}  // namespace
}  // namespace tatec
