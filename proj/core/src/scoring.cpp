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

#include "tatec/scoring.hpp"

#include <cmath>
#include <string>

#include "tatec/errors.hpp"

namespace tatec {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBigram:
      return "bigram";
    case ModelKind::kTrigram:
      return "trigram";
    case ModelKind::kTatecFt:
      return "tatec_ft";
    case ModelKind::kTatecLc:
      return "tatec_lc";
    case ModelKind::kTransE:
      return "transe";
    case ModelKind::kTatecFtNoPretrain:
      return "tatec_ft_no_pretrain";
    case ModelKind::kTatecFtShared:
      return "tatec_ft_shared";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::kBigram, ModelKind::kTrigram, ModelKind::kTatecFt,
                 ModelKind::kTatecLc, ModelKind::kTransE,
                 ModelKind::kTatecFtNoPretrain, ModelKind::kTatecFtShared})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

std::string_view to_string(Block b) {
  switch (b) {
    case Block::kBigramEntity:
      return "bigram_entity";
    case Block::kHeadRelation:
      return "head_relation";
    case Block::kTailRelation:
      return "tail_relation";
    case Block::kDiagonal:
      return "diagonal";
    case Block::kTrigramEntity:
      return "trigram_entity";
    case Block::kRelationMatrix:
      return "relation_matrix";
    case Block::kTransEEntity:
      return "transe_entity";
    case Block::kTransERelation:
      return "transe_relation";
  }
  return "?";
}

bool is_bigram_side(Block b) {
  return b != Block::kTrigramEntity && b != Block::kRelationMatrix;
}

bool is_entity_block(Block b) {
  return b == Block::kBigramEntity || b == Block::kTrigramEntity ||
         b == Block::kTransEEntity;
}

// ---------------------------------------------------------------------------
// Kernels

double diagonal_form(std::span<const double> head, std::span<const double> d,
                     std::span<const double> tail) {
  double s = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) s += head[k] * d[k] * tail[k];
  return s;
}

double bilinear_form(std::span<const double> x, std::span<const double> m,
                     std::span<const double> y) {
  // (x' M) y: row-wise axpy vectorizes where a dot per row would not.
  const std::size_t n = x.size();
  thread_local std::vector<double> u;
  u.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) axpy(x[i], m.subspan(i * n, n), u);
  return dot(u, y);
}

namespace {

void check_indices(const Triple& t, std::size_t num_entities,
                   std::size_t num_relations) {
  if (t.head < 0 || static_cast<std::size_t>(t.head) >= num_entities ||
      t.tail < 0 || static_cast<std::size_t>(t.tail) >= num_entities ||
      t.label < 0 || static_cast<std::size_t>(t.label) >= num_relations)
    throw DomainError("triple (" + std::to_string(t.head) + ", " +
                      std::to_string(t.label) + ", " + std::to_string(t.tail) +
                      ") out of range");
}

std::size_t idx(std::int32_t i) { return static_cast<std::size_t>(i); }

std::array<double, 3> bigram_terms(const BigramParams& p, std::int32_t head,
                                   std::int32_t label, std::int32_t tail) {
  const auto eh = p.entities.row(idx(head));
  const auto et = p.entities.row(idx(tail));
  return {dot(p.head_relations.row(idx(label)), eh),
          dot(p.tail_relations.row(idx(label)), et),
          diagonal_form(eh, p.diagonal.row(0), et)};
}

double transe_value(std::span<const double> eh, std::span<const double> r,
                    std::span<const double> et) {
  double s = 0.0;
  for (std::size_t k = 0; k < eh.size(); ++k) {
    const double v = eh[k] + r[k] - et[k];
    s += v * v;
  }
  return -std::sqrt(s);
}

}  // namespace

double score_bigram(const BigramParams& p, const Triple& t) {
  check_indices(t, p.entities.rows(), p.head_relations.rows());
  const auto terms = bigram_terms(p, t.head, t.label, t.tail);
  return terms[0] + terms[1] + terms[2];
}

double score_trigram(const TrigramParams& p, const Triple& t) {
  check_indices(t, p.entities.rows(), p.relations.rows());
  return bilinear_form(p.entities.row(idx(t.head)),
                       p.relations.row(idx(t.label)),
                       p.entities.row(idx(t.tail)));
}

double score_ft(const BigramParams& b, const TrigramParams& tr,
                const Triple& t) {
  return score_bigram(b, t) + score_trigram(tr, t);
}

Features lc_features(const BigramParams& b, const TrigramParams& tr,
                     const Triple& t) {
  check_indices(t, b.entities.rows(), b.head_relations.rows());
  const auto terms = bigram_terms(b, t.head, t.label, t.tail);
  return {terms[0], terms[1], terms[2], score_trigram(tr, t)};
}

double score_lc(const BigramParams& b, const TrigramParams& tr,
                const CombinationWeights& w, const Triple& t) {
  const auto f = lc_features(b, tr, t);
  const auto d = w.delta.row(idx(t.label));
  return d[0] * f[0] + d[1] * f[1] + d[2] * f[2] + d[3] * f[3];
}

double score_transe(const TransEParams& p, const Triple& t) {
  check_indices(t, p.entities.rows(), p.relations.rows());
  return transe_value(p.entities.row(idx(t.head)),
                      p.relations.row(idx(t.label)),
                      p.entities.row(idx(t.tail)));
}

// ---------------------------------------------------------------------------
// Model

Model Model::zeros(ModelKind kind, std::int32_t num_entities,
                   std::int32_t num_relations, std::size_t d1,
                   std::size_t d2) {
  if (num_entities < 1 || num_relations < 1)
    throw DomainError("model needs at least one entity and one relation");
  Model m;
  m.kind_ = kind;
  m.num_entities_ = num_entities;
  m.num_relations_ = num_relations;
  const auto e = idx(num_entities);
  const auto l = idx(num_relations);

  const bool wants_bigram = kind != ModelKind::kTrigram &&
                            kind != ModelKind::kTransE;
  const bool wants_trigram = kind != ModelKind::kBigram &&
                             kind != ModelKind::kTransE;
  if (kind == ModelKind::kTatecFtShared && d1 != d2)
    throw ConfigError("tatec_ft_shared requires d1 == d2");

  if (wants_bigram || kind == ModelKind::kTransE) {
    if (d1 < 1) throw ConfigError("d1 must be at least 1");
    m.d1_ = d1;
  }
  if (wants_trigram) {
    if (d2 < 1) throw ConfigError("d2 must be at least 1");
    m.d2_ = d2;
  }
  if (wants_bigram)
    m.bigram_ = BigramParams{Matrix(e, d1), Matrix(l, d1), Matrix(l, d1),
                             Matrix(1, d1)};
  if (wants_trigram)
    m.trigram_ = TrigramParams{
        kind == ModelKind::kTatecFtShared ? Matrix() : Matrix(e, d2),
        Matrix(l, d2 * d2), d2};
  if (kind == ModelKind::kTransE)
    m.transe_ = TransEParams{Matrix(e, d1), Matrix(l, d1)};
  if (kind == ModelKind::kTatecLc) {
    CombinationWeights w;
    w.delta = Matrix(l, kNumFeatures, 1.0);
    w.alpha = 1.0;
    w.sigma.assign(l, w.alpha / static_cast<double>(l));
    m.weights_ = std::move(w);
  }
  return m;
}

Model Model::combine(ModelKind kind, const Model& bigram, const Model& trigram,
                     double alpha, double epsilon) {
  if (kind != ModelKind::kTatecFt && kind != ModelKind::kTatecLc &&
      kind != ModelKind::kTatecFtNoPretrain)
    throw ConfigError("combine() builds tatec_ft or tatec_lc models only");
  if (!bigram.has_bigram() || bigram.has_trigram())
    throw ConfigError("pre-trained bigram constituent expected");
  if (!trigram.has_trigram() || trigram.has_bigram())
    throw ConfigError("pre-trained trigram constituent expected");
  if (bigram.num_entities() != trigram.num_entities() ||
      bigram.num_relations() != trigram.num_relations())
    throw ConfigError("constituents were trained on different vocabularies");
  if (alpha <= 0.0) throw ConfigError("alpha must be positive");
  if (epsilon <= 0.0) throw ConfigError("epsilon must be positive");
  Model m;
  m.kind_ = kind;
  m.num_entities_ = bigram.num_entities();
  m.num_relations_ = bigram.num_relations();
  m.d1_ = bigram.d1();
  m.d2_ = trigram.d2();
  m.bigram_ = bigram.bigram();
  m.trigram_ = trigram.trigram();
  if (kind == ModelKind::kTatecLc) {
    const auto l = idx(m.num_relations_);
    CombinationWeights w;
    w.delta = Matrix(l, kNumFeatures, 1.0);
    w.alpha = alpha;
    w.epsilon = epsilon;
    w.sigma.assign(l, alpha / static_cast<double>(l));
    m.weights_ = std::move(w);
  }
  return m;
}

Model Model::bigram_part() const {
  if (!has_bigram()) throw ConfigError("model has no bigram term");
  Model m;
  m.kind_ = ModelKind::kBigram;
  m.num_entities_ = num_entities_;
  m.num_relations_ = num_relations_;
  m.d1_ = d1_;
  m.bigram_ = bigram_;
  return m;
}

Model Model::trigram_part() const {
  if (!has_trigram()) throw ConfigError("model has no trigram term");
  Model m;
  m.kind_ = ModelKind::kTrigram;
  m.num_entities_ = num_entities_;
  m.num_relations_ = num_relations_;
  m.d2_ = d2_;
  m.trigram_ = trigram_;
  if (shares_entities()) m.trigram_->entities = bigram_->entities;
  return m;
}

bool Model::has_block(Block b) const {
  switch (b) {
    case Block::kBigramEntity:
    case Block::kHeadRelation:
    case Block::kTailRelation:
    case Block::kDiagonal:
      return has_bigram();
    case Block::kTrigramEntity:
      return has_trigram() && !shares_entities();
    case Block::kRelationMatrix:
      return has_trigram();
    case Block::kTransEEntity:
    case Block::kTransERelation:
      return has_transe();
  }
  return false;
}

Block Model::resolve(Block b) const {
  if (b == Block::kTrigramEntity && shares_entities())
    return Block::kBigramEntity;
  return b;
}

Matrix& Model::block(Block b) {
  return const_cast<Matrix&>(std::as_const(*this).block(b));
}

const Matrix& Model::block(Block b) const {
  switch (resolve(b)) {
    case Block::kBigramEntity:
      return bigram().entities;
    case Block::kHeadRelation:
      return bigram().head_relations;
    case Block::kTailRelation:
      return bigram().tail_relations;
    case Block::kDiagonal:
      return bigram().diagonal;
    case Block::kTrigramEntity:
      return trigram().entities;
    case Block::kRelationMatrix:
      return trigram().relations;
    case Block::kTransEEntity:
      return transe().entities;
    case Block::kTransERelation:
      return transe().relations;
  }
  throw DomainError("unknown block");
}

std::span<const double> Model::trigram_entity(std::int32_t i) const {
  return block(Block::kTrigramEntity).row(idx(i));
}

void Model::check(const Triple& t) const {
  check_indices(t, idx(num_entities_), idx(num_relations_));
}

double Model::score(const Triple& t) const {
  check(t);
  switch (kind_) {
    case ModelKind::kBigram:
      return score_bigram(*bigram_, t);
    case ModelKind::kTrigram:
      return score_trigram(*trigram_, t);
    case ModelKind::kTransE:
      return score_transe(*transe_, t);
    case ModelKind::kTatecLc:
      return score_lc(*bigram_, *trigram_, *weights_, t);
    case ModelKind::kTatecFt:
    case ModelKind::kTatecFtNoPretrain:
    case ModelKind::kTatecFtShared: {
      const auto terms = bigram_terms(*bigram_, t.head, t.label, t.tail);
      const double tri =
          bilinear_form(trigram_entity(t.head),
                        trigram_->relations.row(idx(t.label)),
                        trigram_entity(t.tail));
      return terms[0] + terms[1] + terms[2] + tri;
    }
  }
  return 0.0;
}

namespace {

// Weights of the four sub-scores for model kinds that have both terms.
Features term_weights(const Model& m, std::int32_t label) {
  if (m.kind() == ModelKind::kTatecLc) {
    const auto d = m.weights().delta.row(idx(label));
    return {d[0], d[1], d[2], d[3]};
  }
  return {1.0, 1.0, 1.0, 1.0};
}

}  // namespace

void Model::score_tails(std::int32_t head, std::int32_t label,
                        std::span<double> out) const {
  check({head, label, 0});
  if (out.size() != idx(num_entities_))
    throw DomainError("score_tails: output size must equal entity count");
  if (has_transe()) {
    const auto eh = transe_->entities.row(idx(head));
    const auto r = transe_->relations.row(idx(label));
    for (std::size_t x = 0; x < out.size(); ++x)
      out[x] = transe_value(eh, r, transe_->entities.row(x));
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  const auto w = term_weights(*this, label);
  if (has_bigram()) {
    const auto& b = *bigram_;
    const auto eh = b.entities.row(idx(head));
    const double c = w[0] * dot(b.head_relations.row(idx(label)), eh);
    const auto r2 = b.tail_relations.row(idx(label));
    const auto d = b.diagonal.row(0);
    for (std::size_t x = 0; x < out.size(); ++x) {
      const auto ex = b.entities.row(x);
      out[x] = c + w[1] * dot(r2, ex) + w[2] * diagonal_form(eh, d, ex);
    }
  }
  if (has_trigram()) {
    const std::size_t n = d2_;
    const auto eh = trigram_entity(head);
    const auto m = trigram_->relations.row(idx(label));
    std::vector<double> u(n, 0.0);  // R' e_h
    for (std::size_t i = 0; i < n; ++i) axpy(eh[i], m.subspan(i * n, n), u);
    for (std::size_t x = 0; x < out.size(); ++x)
      out[x] += w[3] * dot(u, trigram_entity(static_cast<std::int32_t>(x)));
  }
}

void Model::score_heads(std::int32_t label, std::int32_t tail,
                        std::span<double> out) const {
  check({0, label, tail});
  if (out.size() != idx(num_entities_))
    throw DomainError("score_heads: output size must equal entity count");
  if (has_transe()) {
    const auto et = transe_->entities.row(idx(tail));
    const auto r = transe_->relations.row(idx(label));
    for (std::size_t x = 0; x < out.size(); ++x)
      out[x] = transe_value(transe_->entities.row(x), r, et);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  const auto w = term_weights(*this, label);
  if (has_bigram()) {
    const auto& b = *bigram_;
    const auto et = b.entities.row(idx(tail));
    const double c = w[1] * dot(b.tail_relations.row(idx(label)), et);
    const auto r1 = b.head_relations.row(idx(label));
    const auto d = b.diagonal.row(0);
    for (std::size_t x = 0; x < out.size(); ++x) {
      const auto ex = b.entities.row(x);
      out[x] = w[0] * dot(r1, ex) + c + w[2] * diagonal_form(ex, d, et);
    }
  }
  if (has_trigram()) {
    const std::size_t n = d2_;
    const auto et = trigram_entity(tail);
    const auto m = trigram_->relations.row(idx(label));
    std::vector<double> v(n);  // R e_t
    for (std::size_t i = 0; i < n; ++i) v[i] = dot(m.subspan(i * n, n), et);
    for (std::size_t x = 0; x < out.size(); ++x)
      out[x] += w[3] * dot(trigram_entity(static_cast<std::int32_t>(x)), v);
  }
}

void Model::score_labels(std::int32_t head, std::int32_t tail,
                         std::span<double> out) const {
  if (out.size() != idx(num_relations_))
    throw DomainError("score_labels: output size must equal relation count");
  for (std::size_t l = 0; l < out.size(); ++l)
    out[l] = score({head, static_cast<std::int32_t>(l), tail});
}

// ---------------------------------------------------------------------------
// Gradients

GradientBuffer::GradientBuffer(const Model& model) {
  for (int k = 0; k < kNumBlocks; ++k) {
    const auto b = static_cast<Block>(k);
    if (!model.has_block(b)) continue;
    auto& entry = blocks_[static_cast<std::size_t>(k)];
    entry.cols = model.block(b).cols();
    entry.slot.assign(model.block(b).rows(), -1);
  }
}

std::span<double> GradientBuffer::row(Block b, std::size_t i) {
  auto& e = blocks_[static_cast<std::size_t>(b)];
  if (i >= e.slot.size())
    throw DomainError("gradient row out of range for block " +
                      std::string(to_string(b)));
  auto& s = e.slot[i];
  if (s < 0) {
    s = static_cast<std::int32_t>(e.rows.size());
    e.rows.push_back(static_cast<std::int32_t>(i));
    e.values.resize(e.values.size() + e.cols, 0.0);
  }
  return {e.values.data() + static_cast<std::size_t>(s) * e.cols, e.cols};
}

std::span<const double> GradientBuffer::find(Block b, std::size_t i) const {
  const auto& e = blocks_[static_cast<std::size_t>(b)];
  if (i >= e.slot.size() || e.slot[i] < 0) return {};
  return {e.values.data() + static_cast<std::size_t>(e.slot[i]) * e.cols,
          e.cols};
}

bool GradientBuffer::touches(Block b, std::size_t i) const {
  const auto& e = blocks_[static_cast<std::size_t>(b)];
  return i < e.slot.size() && e.slot[i] >= 0;
}

bool GradientBuffer::empty() const {
  for (const auto& e : blocks_)
    if (!e.rows.empty()) return false;
  return true;
}

void GradientBuffer::clear() {
  for (auto& e : blocks_) {
    for (auto r : e.rows) e.slot[idx(r)] = -1;
    e.rows.clear();
    e.values.clear();
  }
}

void accumulate_score_gradient(const Model& model, const Triple& t,
                               double coeff, GradientBuffer& out) {
  model.check(t);
  const auto h = idx(t.head), l = idx(t.label), tl = idx(t.tail);

  if (model.has_transe()) {
    const auto& p = model.transe();
    const auto eh = p.entities.row(h), r = p.relations.row(l),
               et = p.entities.row(tl);
    std::vector<double> v(eh.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = eh[k] + r[k] - et[k];
    const double n = norm(v);
    if (n == 0.0) return;  // subgradient 0 at the kink
    // d(-||v||)/dv = -v/||v||
    const double c = -coeff / n;
    axpy(c, v, out.row(Block::kTransEEntity, h));
    axpy(c, v, out.row(Block::kTransERelation, l));
    axpy(-c, v, out.row(Block::kTransEEntity, tl));
    return;
  }

  const auto w = term_weights(model, t.label);
  if (model.has_bigram()) {
    const auto& b = model.bigram();
    const auto eh = b.entities.row(h), et = b.entities.row(tl);
    const auto r1 = b.head_relations.row(l), r2 = b.tail_relations.row(l);
    const auto d = b.diagonal.row(0);
    const std::size_t n = d.size();
    axpy(coeff * w[0], eh, out.row(Block::kHeadRelation, l));
    axpy(coeff * w[1], et, out.row(Block::kTailRelation, l));
    {
      auto g = out.row(Block::kDiagonal, 0);
      const double c = coeff * w[2];
      for (std::size_t k = 0; k < n; ++k) g[k] += c * eh[k] * et[k];
    }
    {
      auto g = out.row(Block::kBigramEntity, h);
      for (std::size_t k = 0; k < n; ++k)
        g[k] += coeff * (w[0] * r1[k] + w[2] * d[k] * et[k]);
    }
    {
      auto g = out.row(Block::kBigramEntity, tl);
      for (std::size_t k = 0; k < n; ++k)
        g[k] += coeff * (w[1] * r2[k] + w[2] * d[k] * eh[k]);
    }
  }
  if (model.has_trigram()) {
    const double c = coeff * w[3];
    const auto eb = model.resolve(Block::kTrigramEntity);
    const auto eh = model.trigram_entity(t.head);
    const auto et = model.trigram_entity(t.tail);
    const auto m = model.trigram().relations.row(l);
    const std::size_t n = model.d2();
    {
      auto g = out.row(Block::kRelationMatrix, l);
      for (std::size_t i = 0; i < n; ++i)
        axpy(c * eh[i], et, g.subspan(i * n, n));
    }
    {
      auto g = out.row(eb, h);  // R e_t
      for (std::size_t i = 0; i < n; ++i)
        g[i] += c * dot(m.subspan(i * n, n), et);
    }
    {
      auto g = out.row(eb, tl);  // R' e_h
      for (std::size_t i = 0; i < n; ++i)
        axpy(c * eh[i], m.subspan(i * n, n), g);
    }
  }
}

double grad_pair(const Model& model, const Triple& pos, const Triple& neg,
                 double gamma, GradientBuffer& out) {
  const double loss = gamma - model.score(pos) + model.score(neg);
  if (loss <= 0.0) return 0.0;
  accumulate_score_gradient(model, pos, -1.0, out);
  accumulate_score_gradient(model, neg, 1.0, out);
  return loss;
}

}  // namespace tatec
