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

#include "tatec/kbdata.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "tatec/errors.hpp"

namespace tatec {

namespace {

std::uint64_t fnv1a(const std::vector<std::string>& names) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& name : names) {
    for (unsigned char c : name) mix(c);
    mix('\n');
  }
  return h;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocab

Vocab::Vocab(std::vector<std::string> entities,
             std::vector<std::string> relations) {
  for (const auto& e : entities) {
    if (find_entity(e)) throw DataError("duplicate entity name '" + e + "'");
    add_entity(e);
  }
  for (const auto& r : relations) {
    if (find_relation(r)) throw DataError("duplicate relation name '" + r + "'");
    add_relation(r);
  }
}

std::optional<std::int32_t> Vocab::find_entity(std::string_view name) const {
  auto it = entity_index_.find(std::string(name));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> Vocab::find_relation(std::string_view name) const {
  auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Vocab::entity_index(std::string_view name) const {
  if (auto i = find_entity(name)) return *i;
  throw VocabError(std::string(name));
}

std::int32_t Vocab::relation_index(std::string_view name) const {
  if (auto i = find_relation(name)) return *i;
  throw VocabError(std::string(name));
}

const std::string& Vocab::entity_name(std::int32_t i) const {
  if (i < 0 || i >= num_entities())
    throw DomainError("entity index " + std::to_string(i) + " out of range");
  return entities_[static_cast<std::size_t>(i)];
}

const std::string& Vocab::relation_name(std::int32_t i) const {
  if (i < 0 || i >= num_relations())
    throw DomainError("relation index " + std::to_string(i) + " out of range");
  return relations_[static_cast<std::size_t>(i)];
}

std::int32_t Vocab::add_entity(std::string_view name) {
  auto [it, inserted] =
      entity_index_.try_emplace(std::string(name), num_entities());
  if (inserted) entities_.emplace_back(name);
  return it->second;
}

std::int32_t Vocab::add_relation(std::string_view name) {
  auto [it, inserted] =
      relation_index_.try_emplace(std::string(name), num_relations());
  if (inserted) relations_.emplace_back(name);
  return it->second;
}

std::uint64_t Vocab::entity_hash() const { return fnv1a(entities_); }
std::uint64_t Vocab::relation_hash() const { return fnv1a(relations_); }

// ---------------------------------------------------------------------------
// TripleSet

TripleSet::TripleSet(std::vector<Triple> triples, std::int32_t num_entities,
                     std::int32_t num_relations,
                     std::optional<std::vector<bool>> truth)
    : triples_(std::move(triples)),
      truth_(std::move(truth)),
      num_entities_(num_entities),
      num_relations_(num_relations) {
  if (truth_ && truth_->size() != triples_.size())
    throw DomainError("truth vector size does not match triple count");
  counts_.reserve(triples_.size());
  for (const auto& t : triples_) {
    if (t.head < 0 || t.head >= num_entities_ || t.tail < 0 ||
        t.tail >= num_entities_ || t.label < 0 || t.label >= num_relations_)
      throw DomainError("triple index out of range");
    if (counts_[key(t)]++ == 0) {
      heads_[pair_key(t.label, t.tail)].push_back(t.head);
      tails_[pair_key(t.label, t.head)].push_back(t.tail);
    }
  }
}

std::uint64_t TripleSet::key(const Triple& t) const {
  const auto e = static_cast<std::uint64_t>(num_entities_);
  const auto l = static_cast<std::uint64_t>(num_relations_);
  return (static_cast<std::uint64_t>(t.head) * l +
          static_cast<std::uint64_t>(t.label)) *
             e +
         static_cast<std::uint64_t>(t.tail);
}

std::uint64_t TripleSet::pair_key(std::int32_t label,
                                  std::int32_t entity) const {
  return static_cast<std::uint64_t>(label) *
             static_cast<std::uint64_t>(num_entities_) +
         static_cast<std::uint64_t>(entity);
}

std::size_t TripleSet::count(const Triple& t) const {
  if (t.head < 0 || t.head >= num_entities_ || t.tail < 0 ||
      t.tail >= num_entities_ || t.label < 0 || t.label >= num_relations_)
    return 0;
  auto it = counts_.find(key(t));
  return it == counts_.end() ? 0 : it->second;
}

std::span<const std::int32_t> TripleSet::heads(std::int32_t label,
                                               std::int32_t tail) const {
  auto it = heads_.find(pair_key(label, tail));
  if (it == heads_.end()) return {};
  return it->second;
}

std::span<const std::int32_t> TripleSet::tails(std::int32_t label,
                                               std::int32_t head) const {
  auto it = tails_.find(pair_key(label, head));
  if (it == tails_.end()) return {};
  return it->second;
}

TripleSet TripleSet::positives() const {
  if (!truth_) return *this;
  std::vector<Triple> out;
  for (std::size_t i = 0; i < triples_.size(); ++i)
    if ((*truth_)[i]) out.push_back(triples_[i]);
  return TripleSet(std::move(out), num_entities_, num_relations_);
}

TripleSet TripleSet::negatives() const {
  std::vector<Triple> out;
  if (truth_)
    for (std::size_t i = 0; i < triples_.size(); ++i)
      if (!(*truth_)[i]) out.push_back(triples_[i]);
  return TripleSet(std::move(out), num_entities_, num_relations_);
}

TripleSet TripleSet::subset(std::span<const std::size_t> indices) const {
  std::vector<Triple> out;
  out.reserve(indices.size());
  std::optional<std::vector<bool>> truth;
  if (truth_) truth.emplace();
  for (auto i : indices) {
    out.push_back(triples_.at(i));
    if (truth) truth->push_back((*truth_)[i]);
  }
  return TripleSet(std::move(out), num_entities_, num_relations_,
                   std::move(truth));
}

TripleSet TripleSet::concat(std::span<const TripleSet* const> parts) {
  if (parts.empty()) return {};
  std::vector<Triple> out;
  bool labeled = true;
  std::int32_t e = 0, l = 0;
  for (const auto* p : parts) {
    labeled = labeled && p->has_truth();
    e = std::max(e, p->num_entities());
    l = std::max(l, p->num_relations());
  }
  std::optional<std::vector<bool>> truth;
  if (labeled) truth.emplace();
  for (const auto* p : parts) {
    out.insert(out.end(), p->triples_.begin(), p->triples_.end());
    if (truth) truth->insert(truth->end(), p->truth_->begin(), p->truth_->end());
  }
  return TripleSet(std::move(out), e, l, std::move(truth));
}

// ---------------------------------------------------------------------------
// Loading

std::vector<RawTriple> parse_triples(std::istream& in) {
  std::vector<RawTriple> out;
  std::string line;
  std::size_t lineno = 0;
  std::optional<bool> labeled;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError(lineno, "expected 3 or 4 tab-separated fields, got " +
                                   std::to_string(fields.size()));
    for (std::size_t k = 0; k < 3; ++k)
      if (fields[k].empty()) throw ParseError(lineno, "empty field");
    RawTriple raw{std::string(fields[0]), std::string(fields[1]),
                  std::string(fields[2]), std::nullopt};
    if (fields.size() == 4) {
      if (fields[3] == "1")
        raw.truth = true;
      else if (fields[3] == "0")
        raw.truth = false;
      else
        throw ParseError(lineno, "truth flag must be 1 or 0");
    }
    if (labeled && *labeled != raw.truth.has_value())
      throw ParseError(lineno, "truth flag present on some lines only");
    labeled = raw.truth.has_value();
    out.push_back(std::move(raw));
  }
  return out;
}

TripleSet index_triples(std::span<const RawTriple> raw, Vocab& vocab,
                        VocabMode mode) {
  std::vector<Triple> triples;
  triples.reserve(raw.size());
  const bool labeled = !raw.empty() && raw.front().truth.has_value();
  std::optional<std::vector<bool>> truth;
  if (labeled) truth.emplace();
  for (const auto& r : raw) {
    Triple t;
    if (mode == VocabMode::kBuild) {
      t.head = vocab.add_entity(r.head);
      t.label = vocab.add_relation(r.label);
      t.tail = vocab.add_entity(r.tail);
    } else {
      t.head = vocab.entity_index(r.head);
      t.label = vocab.relation_index(r.label);
      t.tail = vocab.entity_index(r.tail);
    }
    triples.push_back(t);
    if (truth) truth->push_back(*r.truth);
  }
  return TripleSet(std::move(triples), vocab.num_entities(),
                   vocab.num_relations(), std::move(truth));
}

LoadedTriples load_triples(std::istream& in) {
  const auto raw = parse_triples(in);
  Vocab vocab;
  auto set = index_triples(raw, vocab, VocabMode::kBuild);
  return {std::move(set), std::move(vocab)};
}

LoadedTriples load_triples(std::istream& in, const Vocab& reuse) {
  const auto raw = parse_triples(in);
  Vocab vocab = reuse;
  auto set = index_triples(raw, vocab, VocabMode::kReuse);
  return {std::move(set), std::move(vocab)};
}

void write_triples(std::ostream& out, const TripleSet& set,
                   const Vocab& vocab) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& t = set[i];
    out << vocab.entity_name(t.head) << '\t' << vocab.relation_name(t.label)
        << '\t' << vocab.entity_name(t.tail);
    if (set.has_truth()) out << '\t' << (set.truth(i) ? '1' : '0');
    out << '\n';
  }
}

void write_vocab(std::ostream& out, std::span<const std::string> names) {
  for (const auto& n : names) out << n << '\n';
}

// ---------------------------------------------------------------------------
// Negatives

std::string_view to_string(CorruptionStrategy s) {
  switch (s) {
    case CorruptionStrategy::kAllDiffer:
      return "all_differ";
    case CorruptionStrategy::kHeadOrTail:
      return "head_or_tail";
    case CorruptionStrategy::kLabelOnly:
      return "label_only";
  }
  return "?";
}

CorruptionStrategy parse_corruption(std::string_view s) {
  if (s == "all_differ") return CorruptionStrategy::kAllDiffer;
  if (s == "head_or_tail") return CorruptionStrategy::kHeadOrTail;
  if (s == "label_only") return CorruptionStrategy::kLabelOnly;
  throw ConfigError("unknown corruption strategy '" + std::string(s) + "'");
}

std::int32_t uniform_index(Rng& rng, std::int32_t n) {
  std::uniform_int_distribution<std::int32_t> dist(0, n - 1);
  return dist(rng);
}

namespace {

// Uniform over [0, n) \ {excluded}.
std::int32_t uniform_other(Rng& rng, std::int32_t n, std::int32_t excluded) {
  const auto x = uniform_index(rng, n - 1);
  return x >= excluded ? x + 1 : x;
}

}  // namespace

Triple sample_corrupted(const Triple& t, CorruptionStrategy strategy,
                        std::int32_t num_entities, std::int32_t num_relations,
                        Rng& rng) {
  if (num_entities < 2 && strategy != CorruptionStrategy::kLabelOnly)
    throw DomainError("corruption needs at least 2 entities");
  if (num_relations < 2 && strategy != CorruptionStrategy::kHeadOrTail)
    throw DomainError("corruption needs at least 2 relations");
  Triple out = t;
  switch (strategy) {
    case CorruptionStrategy::kAllDiffer:
      out.head = uniform_other(rng, num_entities, t.head);
      out.label = uniform_other(rng, num_relations, t.label);
      out.tail = uniform_other(rng, num_entities, t.tail);
      break;
    case CorruptionStrategy::kHeadOrTail:
      if (uniform_index(rng, 2) == 0)
        out.head = uniform_other(rng, num_entities, t.head);
      else
        out.tail = uniform_other(rng, num_entities, t.tail);
      break;
    case CorruptionStrategy::kLabelOnly:
      out.label = uniform_other(rng, num_relations, t.label);
      break;
  }
  return out;
}

TripleSet balance_positives(const TripleSet& positives,
                            const TripleSet& negatives, Rng& rng) {
  if (positives.empty()) throw DomainError("no positive triples to replicate");
  if (negatives.empty()) throw DomainError("no negative triples to match");
  const std::size_t n = positives.size();
  const std::size_t target = std::max(negatives.size(), n);
  std::vector<Triple> out;
  out.reserve(target);
  for (std::size_t c = 0; c + n <= target; c += n)
    out.insert(out.end(), positives.begin(), positives.end());
  const std::size_t remainder = target - out.size();
  if (remainder > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < remainder; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(order[i], order[pick(rng)]);
      out.push_back(positives[order[i]]);
    }
  }
  return TripleSet(std::move(out), positives.num_entities(),
                   positives.num_relations());
}

TripleSet complete_tensor(const TripleSet& positives) {
  const auto e = positives.num_entities();
  const auto l = positives.num_relations();
  std::vector<Triple> all;
  std::vector<bool> truth;
  all.reserve(static_cast<std::size_t>(e) * l * e);
  truth.reserve(all.capacity());
  for (std::int32_t h = 0; h < e; ++h)
    for (std::int32_t r = 0; r < l; ++r)
      for (std::int32_t t = 0; t < e; ++t) {
        Triple tr{h, r, t};
        all.push_back(tr);
        truth.push_back(positives.contains(tr));
      }
  return TripleSet(std::move(all), e, l, std::move(truth));
}

std::vector<int> assign_folds(std::size_t n, int folds, Rng& rng) {
  if (folds < 1) throw DomainError("fold count must be positive");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(n);
  for (std::size_t i = 0; i < n; ++i)
    fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  return fold_of;
}

TripleSet subsample(const TripleSet& set, double fraction, Rng& rng) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw DomainError("subsample fraction must lie in (0, 1]");
  const auto k = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(set.size())));
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return set.subset(order);
}

// ---------------------------------------------------------------------------
// Relation categories

std::string_view to_string(RelationCategory c) {
  switch (c) {
    case RelationCategory::kOneToOne:
      return "1-1";
    case RelationCategory::kOneToMany:
      return "1-M";
    case RelationCategory::kManyToOne:
      return "M-1";
    case RelationCategory::kManyToMany:
      return "M-M";
  }
  return "?";
}

RelationCategories::RelationCategories(const TripleSet& train) {
  const auto l = static_cast<std::size_t>(train.num_relations());
  categories_.assign(l, std::nullopt);
  heads_per_tail_.assign(l, 0.0);
  tails_per_head_.assign(l, 0.0);

  // Distinct triples and distinct (label, tail) / (label, head) pairs.
  std::vector<std::unordered_set<std::uint64_t>> seen(l);
  std::vector<std::unordered_set<std::int32_t>> tails(l), heads(l);
  const auto e = static_cast<std::uint64_t>(train.num_entities());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!train.truth(i)) continue;
    const auto& t = train[i];
    const auto r = static_cast<std::size_t>(t.label);
    seen[r].insert(static_cast<std::uint64_t>(t.head) * e +
                   static_cast<std::uint64_t>(t.tail));
    tails[r].insert(t.tail);
    heads[r].insert(t.head);
  }
  for (std::size_t r = 0; r < l; ++r) {
    if (seen[r].empty()) continue;
    const double distinct = static_cast<double>(seen[r].size());
    heads_per_tail_[r] = distinct / static_cast<double>(tails[r].size());
    tails_per_head_[r] = distinct / static_cast<double>(heads[r].size());
    const bool one_head = heads_per_tail_[r] < 1.5;
    const bool one_tail = tails_per_head_[r] < 1.5;
    categories_[r] = one_head ? (one_tail ? RelationCategory::kOneToOne
                                          : RelationCategory::kOneToMany)
                              : (one_tail ? RelationCategory::kManyToOne
                                          : RelationCategory::kManyToMany);
  }
}

bool RelationCategories::contains(std::int32_t label) const {
  return label >= 0 && static_cast<std::size_t>(label) < categories_.size() &&
         categories_[static_cast<std::size_t>(label)].has_value();
}

RelationCategory RelationCategories::at(std::int32_t label) const {
  if (!contains(label))
    throw DomainError("relation " + std::to_string(label) +
                      " does not occur in the training set");
  return *categories_[static_cast<std::size_t>(label)];
}

double RelationCategories::heads_per_tail(std::int32_t label) const {
  at(label);
  return heads_per_tail_[static_cast<std::size_t>(label)];
}

double RelationCategories::tails_per_head(std::int32_t label) const {
  at(label);
  return tails_per_head_[static_cast<std::size_t>(label)];
}

std::vector<std::size_t> RelationCategories::sizes() const {
  std::vector<std::size_t> out(4, 0);
  for (const auto& c : categories_)
    if (c) ++out[static_cast<std::size_t>(*c)];
  return out;
}

}  // namespace tatec
