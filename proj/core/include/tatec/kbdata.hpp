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
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tatec {

using Rng = std::mt19937_64;

/// Bidirectional name <-> index maps for entities and relations. Indices are
/// dense and assigned in first-appearance order.
class Vocab {
 public:
  Vocab() = default;
  Vocab(std::vector<std::string> entities, std::vector<std::string> relations);

  std::int32_t num_entities() const noexcept {
    return static_cast<std::int32_t>(entities_.size());
  }
  std::int32_t num_relations() const noexcept {
    return static_cast<std::int32_t>(relations_.size());
  }

  // Throw VocabError for unknown names.
  std::int32_t entity_index(std::string_view name) const;
  std::int32_t relation_index(std::string_view name) const;
  std::optional<std::int32_t> find_entity(std::string_view name) const;
  std::optional<std::int32_t> find_relation(std::string_view name) const;

  const std::string& entity_name(std::int32_t i) const;
  const std::string& relation_name(std::int32_t i) const;

  // Return the existing index or append the name.
  std::int32_t add_entity(std::string_view name);
  std::int32_t add_relation(std::string_view name);

  const std::vector<std::string>& entities() const noexcept { return entities_; }
  const std::vector<std::string>& relations() const noexcept {
    return relations_;
  }

  /// FNV-1a over the newline-joined names; detects checkpoint/dataset
  /// mismatches.
  std::uint64_t entity_hash() const;
  std::uint64_t relation_hash() const;

  bool operator==(const Vocab& other) const {
    return entities_ == other.entities_ && relations_ == other.relations_;
  }

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::int32_t> entity_index_;
  std::unordered_map<std::string, std::int32_t> relation_index_;
};

struct Triple {
  std::int32_t head = 0;
  std::int32_t label = 0;
  std::int32_t tail = 0;

  bool operator==(const Triple&) const = default;
  auto operator<=>(const Triple&) const = default;
};

/// Indexed multiset of triples with optional truth labels. Immutable after
/// construction.
class TripleSet {
 public:
  TripleSet() = default;
  TripleSet(std::vector<Triple> triples, std::int32_t num_entities,
            std::int32_t num_relations,
            std::optional<std::vector<bool>> truth = std::nullopt);

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  const Triple& operator[](std::size_t i) const { return triples_[i]; }
  std::span<const Triple> triples() const noexcept { return triples_; }
  auto begin() const { return triples_.begin(); }
  auto end() const { return triples_.end(); }

  std::int32_t num_entities() const noexcept { return num_entities_; }
  std::int32_t num_relations() const noexcept { return num_relations_; }

  bool has_truth() const noexcept { return truth_.has_value(); }
  bool truth(std::size_t i) const { return truth_ ? (*truth_)[i] : true; }

  /// Number of stored copies of t.
  std::size_t count(const Triple& t) const;
  bool contains(const Triple& t) const { return count(t) > 0; }

  /// Distinct heads h with (h, label, tail) stored, in first-appearance order.
  std::span<const std::int32_t> heads(std::int32_t label,
                                      std::int32_t tail) const;
  std::span<const std::int32_t> tails(std::int32_t label,
                                      std::int32_t head) const;

  /// Triples whose truth flag is set (all triples when unlabeled).
  TripleSet positives() const;
  TripleSet negatives() const;

  TripleSet subset(std::span<const std::size_t> indices) const;

  /// Union of several sets over the same vocabulary; truth flags are kept
  /// only if every part carries them.
  static TripleSet concat(std::span<const TripleSet* const> parts);

 private:
  std::uint64_t key(const Triple& t) const;
  std::uint64_t pair_key(std::int32_t label, std::int32_t entity) const;

  std::vector<Triple> triples_;
  std::optional<std::vector<bool>> truth_;
  std::int32_t num_entities_ = 0;
  std::int32_t num_relations_ = 0;
  std::unordered_map<std::uint64_t, std::uint32_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> heads_;
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> tails_;
};

// ---------------------------------------------------------------------------
// Loading

struct RawTriple {
  std::string head;
  std::string label;
  std::string tail;
  std::optional<bool> truth;
};

/// Parses `head<TAB>label<TAB>tail[<TAB>1|0]` lines; blank lines are skipped.
/// Throws ParseError with the 1-based line number.
std::vector<RawTriple> parse_triples(std::istream& in);

enum class VocabMode { kBuild, kReuse };

/// Indexes raw triples against vocab. kBuild appends unseen names, kReuse
/// throws VocabError on the first unknown name. The TripleSet is sized with
/// the vocabulary as it stands after indexing.
TripleSet index_triples(std::span<const RawTriple> raw, Vocab& vocab,
                        VocabMode mode);

struct LoadedTriples {
  TripleSet triples;
  Vocab vocab;
};

LoadedTriples load_triples(std::istream& in);
LoadedTriples load_triples(std::istream& in, const Vocab& reuse);

void write_triples(std::ostream& out, const TripleSet& set, const Vocab& vocab);
void write_vocab(std::ostream& out, std::span<const std::string> names);

// ---------------------------------------------------------------------------
// Negatives

enum class CorruptionStrategy { kAllDiffer, kHeadOrTail, kLabelOnly };

std::string_view to_string(CorruptionStrategy s);
CorruptionStrategy parse_corruption(std::string_view s);

/// Uniform index in [0, n).
std::int32_t uniform_index(Rng& rng, std::int32_t n);

/// Draws one corrupted triple. Never checks the result against known
/// positives.
Triple sample_corrupted(const Triple& t, CorruptionStrategy strategy,
                        std::int32_t num_entities, std::int32_t num_relations,
                        Rng& rng);

/// Replicates positives until there are as many as negatives: whole cycles
/// first, then a remainder drawn without replacement.
TripleSet balance_positives(const TripleSet& positives,
                            const TripleSet& negatives, Rng& rng);

/// Every (h, l, t) over the vocabulary, labeled by membership in positives.
/// Ordered by head, then label, then tail.
TripleSet complete_tensor(const TripleSet& positives);

/// Seeded shuffle then round-robin assignment; fold_of[i] in [0, folds).
std::vector<int> assign_folds(std::size_t n, int folds, Rng& rng);

/// Uniform subsample without replacement of round(fraction * size) triples,
/// original order preserved.
TripleSet subsample(const TripleSet& set, double fraction, Rng& rng);

// ---------------------------------------------------------------------------
// Relation categories

enum class RelationCategory { kOneToOne, kOneToMany, kManyToOne, kManyToMany };

std::string_view to_string(RelationCategory c);

/// Per-relation cardinality categories computed from a training set. A side is
/// "1" when the mean number of distinct entities on that side per unique pair
/// of the other side is below 1.5.
class RelationCategories {
 public:
  explicit RelationCategories(const TripleSet& train);

  /// Throws DomainError for relations absent from the training set.
  RelationCategory at(std::int32_t label) const;
  bool contains(std::int32_t label) const;

  double heads_per_tail(std::int32_t label) const;
  double tails_per_head(std::int32_t label) const;

  /// Number of relations in each category, indexed by RelationCategory.
  std::vector<std::size_t> sizes() const;

 private:
  std::vector<std::optional<RelationCategory>> categories_;
  std::vector<double> heads_per_tail_;
  std::vector<double> tails_per_head_;
};

inline RelationCategories classify_relations(const TripleSet& train) {
  return RelationCategories(train);
}

}  // namespace tatec
