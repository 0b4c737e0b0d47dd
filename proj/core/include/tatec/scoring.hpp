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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tatec/kbdata.hpp"
#include "tatec/matrix.hpp"

namespace tatec {

enum class ModelKind {
  kBigram,
  kTrigram,
  kTatecFt,
  kTatecLc,
  kTransE,
  kTatecFtNoPretrain,
  kTatecFtShared,
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view s);

/// 2-way term: <r_h^l, e^h> + <r_t^l, e^t> + e^h' D e^t with D diagonal and
/// shared by all relations.
struct BigramParams {
  Matrix entities;        // E x d1
  Matrix head_relations;  // L x d1
  Matrix tail_relations;  // L x d1
  Matrix diagonal;        // 1 x d1

  std::size_t dim() const noexcept { return diagonal.cols(); }
  bool operator==(const BigramParams&) const = default;
};

/// 3-way term: e^h' R^l e^t. Each row of `relations` is one d2 x d2 matrix
/// stored row-major.
struct TrigramParams {
  Matrix entities;   // E x d2 (empty when entities are shared with the bigram)
  Matrix relations;  // L x d2*d2
  std::size_t dimension = 0;

  std::size_t dim() const noexcept { return dimension; }
  bool operator==(const TrigramParams&) const = default;
};

/// Translation baseline, scored as -||e^h + r^l - e^t||_2.
struct TransEParams {
  Matrix entities;   // E x d
  Matrix relations;  // L x d

  std::size_t dim() const noexcept { return entities.cols(); }
  bool operator==(const TransEParams&) const = default;
};

/// Per-relation weights of the linear combination. Row l of `delta` weights
/// the four sub-scores (head bias, tail bias, diagonal interaction, trigram).
struct CombinationWeights {
  Matrix delta;               // L x 4
  std::vector<double> sigma;  // L, nonnegative, sums to alpha
  double alpha = 1.0;
  double epsilon = 1e-3;

  bool operator==(const CombinationWeights&) const = default;
};

inline constexpr std::size_t kNumFeatures = 4;
using Features = std::array<double, kNumFeatures>;

// ---------------------------------------------------------------------------
// Span kernels shared by the per-triple and batched paths.

/// e_h' diag(D) e_t
double diagonal_form(std::span<const double> head, std::span<const double> d,
                     std::span<const double> tail);
/// x' M y with M a row-major square matrix.
double bilinear_form(std::span<const double> x, std::span<const double> m,
                     std::span<const double> y);

// ---------------------------------------------------------------------------
// Per-triple scores. Indices are validated; out-of-range throws DomainError.

double score_bigram(const BigramParams& p, const Triple& t);
double score_trigram(const TrigramParams& p, const Triple& t);
double score_ft(const BigramParams& b, const TrigramParams& tr, const Triple& t);
double score_lc(const BigramParams& b, const TrigramParams& tr,
                const CombinationWeights& w, const Triple& t);
double score_transe(const TransEParams& p, const Triple& t);

/// The three bigram sub-terms and the trigram term, unweighted.
Features lc_features(const BigramParams& b, const TrigramParams& tr,
                     const Triple& t);

// ---------------------------------------------------------------------------
// Model: one container for every kind, addressed block-wise by the trainer.

enum class Block : int {
  kBigramEntity,
  kHeadRelation,
  kTailRelation,
  kDiagonal,
  kTrigramEntity,
  kRelationMatrix,
  kTransEEntity,
  kTransERelation,
};
inline constexpr int kNumBlocks = 8;

std::string_view to_string(Block b);
/// Blocks updated with the bigram learning rate (TransE included).
bool is_bigram_side(Block b);
bool is_entity_block(Block b);

class Model {
 public:
  Model() = default;

  /// Zero-initialized parameters for the given kind. For kTransE the
  /// dimension is d1. For kTatecFtShared d1 must equal d2 and a single entity
  /// table serves both terms.
  static Model zeros(ModelKind kind, std::int32_t num_entities,
                     std::int32_t num_relations, std::size_t d1,
                     std::size_t d2);

  ModelKind kind() const noexcept { return kind_; }
  std::int32_t num_entities() const noexcept { return num_entities_; }
  std::int32_t num_relations() const noexcept { return num_relations_; }
  std::size_t d1() const noexcept { return d1_; }
  std::size_t d2() const noexcept { return d2_; }
  bool shares_entities() const noexcept {
    return kind_ == ModelKind::kTatecFtShared;
  }

  bool has_bigram() const noexcept { return bigram_.has_value(); }
  bool has_trigram() const noexcept { return trigram_.has_value(); }
  bool has_transe() const noexcept { return transe_.has_value(); }
  bool has_weights() const noexcept { return weights_.has_value(); }

  BigramParams& bigram() { return bigram_.value(); }
  const BigramParams& bigram() const { return bigram_.value(); }
  TrigramParams& trigram() { return trigram_.value(); }
  const TrigramParams& trigram() const { return trigram_.value(); }
  TransEParams& transe() { return transe_.value(); }
  const TransEParams& transe() const { return transe_.value(); }
  CombinationWeights& weights() { return weights_.value(); }
  const CombinationWeights& weights() const { return weights_.value(); }

  /// Builds a combined model from pre-trained constituents. kTatecFt sums
  /// the two terms; kTatecLc attaches all-ones weights with uniform sigma.
  static Model combine(ModelKind kind, const Model& bigram,
                       const Model& trigram, double alpha = 1.0,
                       double epsilon = 1e-3);

  /// Extracts a stand-alone constituent from a combined model.
  Model bigram_part() const;
  Model trigram_part() const;

  bool has_block(Block b) const;
  Matrix& block(Block b);
  const Matrix& block(Block b) const;
  /// Resolves the trigram entity table to the bigram one when shared.
  Block resolve(Block b) const;

  std::span<const double> trigram_entity(std::int32_t i) const;

  /// Higher is more plausible.
  double score(const Triple& t) const;

  /// Scores of (h, l, x) for every entity x, and the analogues for heads and
  /// labels. `out` must have E (resp. L) entries.
  void score_tails(std::int32_t head, std::int32_t label,
                   std::span<double> out) const;
  void score_heads(std::int32_t label, std::int32_t tail,
                   std::span<double> out) const;
  void score_labels(std::int32_t head, std::int32_t tail,
                    std::span<double> out) const;

  void check(const Triple& t) const;

  bool operator==(const Model&) const = default;

 private:
  ModelKind kind_ = ModelKind::kBigram;
  std::int32_t num_entities_ = 0;
  std::int32_t num_relations_ = 0;
  std::size_t d1_ = 0;
  std::size_t d2_ = 0;
  std::optional<BigramParams> bigram_;
  std::optional<TrigramParams> trigram_;
  std::optional<TransEParams> transe_;
  std::optional<CombinationWeights> weights_;
};

// ---------------------------------------------------------------------------
// Sparse gradients

/// Row-sparse accumulator over a model's blocks. Rows are materialized on
/// first touch; clear() costs O(touched rows).
class GradientBuffer {
 public:
  GradientBuffer() = default;
  explicit GradientBuffer(const Model& model);

  /// Zero-initialized on first access since the last clear().
  std::span<double> row(Block b, std::size_t i);
  std::span<const double> find(Block b, std::size_t i) const;

  std::span<const std::int32_t> touched(Block b) const {
    return blocks_[static_cast<std::size_t>(b)].rows;
  }
  bool touches(Block b, std::size_t i) const;
  bool empty() const;
  void clear();

 private:
  struct Entry {
    std::size_t cols = 0;
    std::vector<std::int32_t> slot;  // row -> slot or -1
    std::vector<std::int32_t> rows;  // touched rows, in first-touch order
    std::vector<double> values;      // rows.size() * cols
  };
  std::array<Entry, kNumBlocks> blocks_;
};

/// Adds coeff * d score(t) / d theta to `out`.
void accumulate_score_gradient(const Model& model, const Triple& t,
                               double coeff, GradientBuffer& out);

/// Hinge loss [gamma - s(pos) + s(neg)]_+ ; when positive, its subgradient is
/// added to `out`. Returns the loss.
double grad_pair(const Model& model, const Triple& pos, const Triple& neg,
                 double gamma, GradientBuffer& out);

}  // namespace tatec
