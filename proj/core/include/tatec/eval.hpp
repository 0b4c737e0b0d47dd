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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tatec/kbdata.hpp"
#include "tatec/scoring.hpp"

namespace tatec {

/// Anything that can score triples. The batched entry points default to
/// per-triple scoring; ModelScorer overrides them with the fast kernels.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::int32_t num_entities() const = 0;
  virtual std::int32_t num_relations() const = 0;
  virtual double score(const Triple& t) const = 0;
  virtual void score_tails(std::int32_t head, std::int32_t label,
                           std::span<double> out) const;
  virtual void score_heads(std::int32_t label, std::int32_t tail,
                           std::span<double> out) const;
  virtual void score_labels(std::int32_t head, std::int32_t tail,
                            std::span<double> out) const;
};

class ModelScorer final : public Scorer {
 public:
  explicit ModelScorer(const Model& model) : model_(model) {}
  std::int32_t num_entities() const override { return model_.num_entities(); }
  std::int32_t num_relations() const override {
    return model_.num_relations();
  }
  double score(const Triple& t) const override { return model_.score(t); }
  void score_tails(std::int32_t head, std::int32_t label,
                   std::span<double> out) const override {
    model_.score_tails(head, label, out);
  }
  void score_heads(std::int32_t label, std::int32_t tail,
                   std::span<double> out) const override {
    model_.score_heads(label, tail, out);
  }
  void score_labels(std::int32_t head, std::int32_t tail,
                    std::span<double> out) const override {
    model_.score_labels(head, tail, out);
  }

 private:
  const Model& model_;
};

/// Wraps a plain scoring function, e.g. in tests.
class FunctionScorer final : public Scorer {
 public:
  FunctionScorer(std::int32_t num_entities, std::int32_t num_relations,
                 std::function<double(const Triple&)> fn)
      : num_entities_(num_entities),
        num_relations_(num_relations),
        fn_(std::move(fn)) {}
  std::int32_t num_entities() const override { return num_entities_; }
  std::int32_t num_relations() const override { return num_relations_; }
  double score(const Triple& t) const override { return fn_(t); }

 private:
  std::int32_t num_entities_;
  std::int32_t num_relations_;
  std::function<double(const Triple&)> fn_;
};

enum class Side { kHead, kTail };
enum class RankMode { kRaw, kFiltered };

/// Rank of scores[target] among the candidates not excluded: one plus the
/// number of strictly higher candidates plus half the tied ones, rounded down.
std::size_t rank_among(std::span<const double> scores, std::size_t target,
                       const std::function<bool(std::size_t)>& excluded = {});

/// Replaces the head (or tail) by every entity. In filtered mode candidates
/// forming a triple of `known`, other than the target, are removed first.
std::size_t rank_entity(const Scorer& scorer, const Triple& t, Side side,
                        RankMode mode, const TripleSet* known);

std::size_t rank_label(const Scorer& scorer, const Triple& t);

/// Label-prediction hit threshold: floor(pct/100 * L), at least 1.
std::size_t label_hit_threshold(std::int32_t num_relations, double pct);

/// Area under the precision-recall curve: thresholds at distinct scores in
/// descending order, tied scores grouped, trapezoids in (recall, precision)
/// starting from the precision of the first threshold at recall 0.
double auc_pr(std::span<const double> scores, std::span<const bool> labels);

// ---------------------------------------------------------------------------
// Reports

struct RankMetrics {
  std::size_t count = 0;
  double mean_rank_raw = 0.0;
  double mean_rank_filtered = 0.0;
  double hits_raw = 0.0;  // percent
  double hits_filtered = 0.0;
};

struct CategoryMetrics {
  RankMetrics head;
  RankMetrics tail;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct EvalReport {
  std::size_t num_triples = 0;
  std::size_t k = 10;
  double mean_rank_raw = 0.0;
  double mean_rank_filtered = 0.0;
  double hits_at_k_raw = 0.0;  // percent
  double hits_at_k_filtered = 0.0;
  std::map<std::string, CategoryMetrics> per_category;
  std::optional<double> auc_pr;
  std::optional<double> label_mean_rank;
  std::optional<double> hits_at_5pct;  // percent
  std::optional<std::size_t> label_threshold;
  std::map<std::string, MeanStd> subsample;
  std::uint64_t seed = 0;
};

struct LinkPredictionOptions {
  std::size_t k = 10;
  /// Repeat a random 4-way split of the test set 5 times and report
  /// mean and standard deviation of the 20 subset metrics.
  bool subsample = false;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// Relation categories come from this set when given.
  const TripleSet* train = nullptr;
};

/// Per-triple ranks for both sides, in test order.
struct EntityRanks {
  std::vector<std::size_t> head_raw, head_filtered, tail_raw, tail_filtered;
};

EntityRanks compute_entity_ranks(const Scorer& scorer, const TripleSet& test,
                                 const TripleSet* known, std::size_t threads);

EvalReport eval_link_prediction(const Scorer& scorer, const TripleSet& test,
                                const TripleSet* known,
                                const LinkPredictionOptions& options = {});

struct LabelMetrics {
  double mean_rank = 0.0;
  double hits = 0.0;  // percent
  std::size_t threshold = 0;
};

LabelMetrics eval_label_prediction(const Scorer& scorer, const TripleSet& test,
                                   double pct = 5.0, std::size_t threads = 1);

/// AUC-PR of the scorer on a truth-labeled set.
double eval_classification(const Scorer& scorer, const TripleSet& test,
                           std::size_t threads = 1);

/// Draws n triples keeping the positive/negative proportion (all when n is 0
/// or at least the set size).
TripleSet stratified_sample(const TripleSet& set, std::size_t n, Rng& rng);

/// Runs `fn(i)` for i in [0, n) over `threads` workers.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Validation during training

enum class ValidationMetric {
  kAucPr,
  kFilteredMeanRank,
  kRawMeanRank,
  kLabelMeanRank,
};

std::string_view to_string(ValidationMetric m);
ValidationMetric parse_validation_metric(std::string_view s);
bool higher_is_better(ValidationMetric m);

/// Fixed validation sample plus metric. The sample is drawn once so every
/// validation point of a run sees the same triples.
class Validator {
 public:
  Validator(const TripleSet& valid, ValidationMetric metric,
            std::size_t sample, const TripleSet* known, Rng& rng,
            std::size_t threads = 1);

  double evaluate(const Model& model) const;
  ValidationMetric metric() const noexcept { return metric_; }
  bool better(double candidate, double incumbent) const;
  /// Ties count; model selection uses this so that the later of equally
  /// good snapshots wins.
  bool at_least_as_good(double candidate, double incumbent) const {
    return !better(incumbent, candidate);
  }
  const TripleSet& sample() const noexcept { return sample_; }

 private:
  TripleSet sample_;
  ValidationMetric metric_;
  const TripleSet* known_;
  std::size_t threads_;
};

// ---------------------------------------------------------------------------
// Serialization

/// `key: value` lines, followed by the per-category table.
std::string to_text(const EvalReport& report);
/// JSON record.
std::string to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view json);

}  // namespace tatec
