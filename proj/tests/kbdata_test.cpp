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

#include <map>
#include <set>
#include <sstream>

#include "support.hpp"
#include "tatec/errors.hpp"
#include "tatec/kbdata.hpp"

namespace tatec {
namespace {

TEST(LoadTriples, CountsEntitiesAndRelations) {
  std::istringstream in("a\tr\tb\nb\tr\tc\nc\ts\td\n");
  const auto [set, vocab] = load_triples(in);
  EXPECT_EQ(set.size(), 3u);
  EXPECT_EQ(vocab.num_entities(), 4);
  EXPECT_EQ(vocab.num_relations(), 2);
  EXPECT_FALSE(set.has_truth());
  // First-appearance order.
  EXPECT_EQ(vocab.entity_index("a"), 0);
  EXPECT_EQ(vocab.entity_index("d"), 3);
  EXPECT_EQ(vocab.relation_index("s"), 1);
}

TEST(LoadTriples, SkipsBlankLinesAndReadsTruth) {
  std::istringstream in("a\tr\tb\t1\n\nb\tr\ta\t0\n");
  const auto [set, vocab] = load_triples(in);
  ASSERT_EQ(set.size(), 2u);
  ASSERT_TRUE(set.has_truth());
  EXPECT_TRUE(set.truth(0));
  EXPECT_FALSE(set.truth(1));
  EXPECT_EQ(set.positives().size(), 1u);
  EXPECT_EQ(set.negatives().size(), 1u);
}

TEST(LoadTriples, WrongFieldCountReportsLine) {
  std::istringstream in("a\tr\tb\na\tr\n");
  try {
    load_triples(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadTriples, RejectsBadTruthFlagAndMixedColumns) {
  std::istringstream bad("a\tr\tb\t2\n");
  EXPECT_THROW(load_triples(bad), ParseError);
  std::istringstream mixed("a\tr\tb\t1\na\tr\tc\n");
  EXPECT_THROW(load_triples(mixed), ParseError);
}

TEST(LoadTriples, ReuseModeNamesUnknownSymbol) {
  std::istringstream first("a\tr\tb\n");
  const auto built = load_triples(first);
  std::istringstream second("a\tr\tzzz\n");
  try {
    load_triples(second, built.vocab);
    FAIL() << "expected VocabError";
  } catch (const VocabError& e) {
    EXPECT_EQ(e.symbol(), "zzz");
    EXPECT_NE(std::string(e.what()).find("zzz"), std::string::npos);
  }
}

TEST(LoadTriples, WriteReadRoundTrip) {
  std::istringstream in("x\tp\ty\t1\ny\tq\tz\t0\n");
  const auto a = load_triples(in);
  std::ostringstream out;
  write_triples(out, a.triples, a.vocab);
  std::istringstream again(out.str());
  const auto b = load_triples(again);
  EXPECT_EQ(a.vocab, b.vocab);
  ASSERT_EQ(a.triples.size(), b.triples.size());
  for (std::size_t i = 0; i < a.triples.size(); ++i) {
    EXPECT_EQ(a.triples[i], b.triples[i]);
    EXPECT_EQ(a.triples.truth(i), b.triples.truth(i));
  }
}

TEST(Vocab, RoundTripsEveryIndex) {
  Vocab v;
  for (int i = 0; i < 50; ++i) v.add_entity("e" + std::to_string(i * 7 % 50));
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(v.entity_index(v.entity_name(i)), i);
  }
  EXPECT_EQ(v.add_entity("e0"), v.entity_index("e0"));
  EXPECT_THROW(v.entity_name(50), DomainError);
  EXPECT_FALSE(v.find_relation("nope").has_value());
}

TEST(Vocab, HashDetectsReordering) {
  Vocab a({"x", "y"}, {"r"});
  Vocab b({"y", "x"}, {"r"});
  EXPECT_NE(a.entity_hash(), b.entity_hash());
  EXPECT_EQ(a.relation_hash(), b.relation_hash());
}

TEST(TripleSet, MembershipCountsDuplicates) {
  const TripleSet s({{0, 0, 1}, {0, 0, 1}, {1, 0, 2}}, 3, 1);
  EXPECT_EQ(s.count({0, 0, 1}), 2u);
  EXPECT_EQ(s.count({1, 0, 2}), 1u);
  EXPECT_FALSE(s.contains({2, 0, 1}));
}

TEST(TripleSet, IndexesAgreeWithTripleList) {
  Rng rng(3);
  const auto kb = testing::random_kb(8, 3, 60, rng);
  for (std::int32_t l = 0; l < 3; ++l)
    for (std::int32_t x = 0; x < 8; ++x) {
      std::set<std::int32_t> heads, tails;
      for (const auto& t : kb) {
        if (t.label == l && t.tail == x) heads.insert(t.head);
        if (t.label == l && t.head == x) tails.insert(t.tail);
      }
      const auto h = kb.heads(l, x);
      const auto t = kb.tails(l, x);
      EXPECT_EQ(std::set<std::int32_t>(h.begin(), h.end()), heads);
      EXPECT_EQ(std::set<std::int32_t>(t.begin(), t.end()), tails);
      EXPECT_EQ(h.size(), heads.size());
    }
}

TEST(TripleSet, CompleteTensorLabelsMembership) {
  const TripleSet pos({{0, 0, 1}, {1, 1, 0}}, 2, 2);
  const auto all = complete_tensor(pos);
  ASSERT_EQ(all.size(), 8u);
  ASSERT_TRUE(all.has_truth());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all.truth(i), pos.contains(all[i]));
    positives += all.truth(i);
  }
  EXPECT_EQ(positives, 2u);
  EXPECT_EQ(all[0], (Triple{0, 0, 0}));
  EXPECT_EQ(all[1], (Triple{0, 0, 1}));
}

// ---------------------------------------------------------------------------
// Corruption

TEST(SampleCorrupted, HeadOrTailChangesExactlyOneEntity) {
  Rng rng(11);
  const Triple t{2, 5, 7};
  std::size_t heads = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto c = sample_corrupted(t, CorruptionStrategy::kHeadOrTail, 10, 8, rng);
    EXPECT_EQ(c.label, t.label);
    EXPECT_NE(c.head != t.head, c.tail != t.tail);
    ASSERT_GE(c.head, 0);
    ASSERT_LT(c.head, 10);
    ASSERT_LT(c.tail, 10);
    heads += c.head != t.head;
  }
  // Both sides get corrupted.
  EXPECT_GT(heads, 4500u);
  EXPECT_LT(heads, 5500u);
}

TEST(SampleCorrupted, LabelOnlyChangesOnlyLabel) {
  Rng rng(12);
  const Triple t{2, 5, 7};
  std::set<std::int32_t> labels;
  for (int i = 0; i < 10000; ++i) {
    const auto c = sample_corrupted(t, CorruptionStrategy::kLabelOnly, 10, 8, rng);
    EXPECT_EQ(c.head, 2);
    EXPECT_EQ(c.tail, 7);
    EXPECT_NE(c.label, 5);
    labels.insert(c.label);
  }
  EXPECT_EQ(labels.size(), 7u);
}

TEST(SampleCorrupted, AllDifferIsUniformOverItsSupport) {
  Rng rng(13);
  const Triple t{0, 0, 1};
  constexpr int kDraws = 100000;
  std::map<std::pair<int, int>, int> cells;
  for (int i = 0; i < kDraws; ++i) {
    const auto c = sample_corrupted(t, CorruptionStrategy::kAllDiffer, 3, 2, rng);
    ASSERT_EQ(c.label, 1);
    ASSERT_TRUE(c.head == 1 || c.head == 2);
    ASSERT_TRUE(c.tail == 0 || c.tail == 2);
    ++cells[{c.head, c.tail}];
  }
  ASSERT_EQ(cells.size(), 4u);
  // Per-cell binomial: p = 1/4, sigma = sqrt(n p (1 - p)).
  const double expected = kDraws / 4.0;
  const double sigma = std::sqrt(kDraws * 0.25 * 0.75);
  double chi2 = 0.0;
  for (const auto& [cell, n] : cells) {
    EXPECT_LE(std::abs(n - expected), 3.0 * sigma);
    chi2 += (n - expected) * (n - expected) / expected;
  }
  // 3 degrees of freedom; 16.27 is the 0.999 quantile.
  EXPECT_LT(chi2, 16.27);
}

TEST(SampleCorrupted, TooFewSymbolsIsDomainError) {
  Rng rng(1);
  EXPECT_THROW(sample_corrupted({0, 0, 0}, CorruptionStrategy::kHeadOrTail, 1, 3, rng),
               DomainError);
  EXPECT_THROW(sample_corrupted({0, 0, 1}, CorruptionStrategy::kLabelOnly, 3, 1, rng),
               DomainError);
  EXPECT_THROW(sample_corrupted({0, 0, 1}, CorruptionStrategy::kAllDiffer, 3, 1, rng),
               DomainError);
}

TEST(CorruptionStrategy, NamesRoundTrip) {
  for (auto s : {CorruptionStrategy::kAllDiffer, CorruptionStrategy::kHeadOrTail,
                 CorruptionStrategy::kLabelOnly})
    EXPECT_EQ(parse_corruption(to_string(s)), s);
  EXPECT_THROW(parse_corruption("sideways"), ConfigError);
}

// ---------------------------------------------------------------------------
// Replication

std::map<Triple, int> multiplicities(const TripleSet& s) {
  std::map<Triple, int> m;
  for (const auto& t : s) ++m[t];
  return m;
}

TripleSet distinct_triples(std::size_t n) {
  std::vector<Triple> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back({static_cast<std::int32_t>(i), 0, static_cast<std::int32_t>(i)});
  return TripleSet(v, static_cast<std::int32_t>(std::max<std::size_t>(n, 1)), 1);
}

TEST(BalancePositives, ExactDivisionReplicatesEvenly) {
  Rng rng(1);
  const auto out = balance_positives(distinct_triples(3), distinct_triples(9), rng);
  EXPECT_EQ(out.size(), 9u);
  for (const auto& [t, n] : multiplicities(out)) EXPECT_EQ(n, 3);
}

TEST(BalancePositives, RemainderAddsAtMostOneCopy) {
  Rng rng(2);
  const auto out = balance_positives(distinct_triples(4), distinct_triples(10), rng);
  EXPECT_EQ(out.size(), 10u);
  const auto m = multiplicities(out);
  ASSERT_EQ(m.size(), 4u);
  int threes = 0;
  for (const auto& [t, n] : m) {
    EXPECT_TRUE(n == 2 || n == 3);
    threes += n == 3;
  }
  EXPECT_EQ(threes, 2);
}

TEST(BalancePositives, EqualSizesLeavePositivesUnchanged) {
  Rng rng(3);
  const auto pos = distinct_triples(5);
  const auto out = balance_positives(pos, distinct_triples(5), rng);
  ASSERT_EQ(out.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(out[i], pos[i]);
}

TEST(BalancePositives, RandomSizesKeepCountsWithinOne) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 1 + static_cast<std::size_t>(uniform_index(rng, 20));
    const std::size_t n = p + static_cast<std::size_t>(uniform_index(rng, 100));
    const auto out = balance_positives(distinct_triples(p), distinct_triples(n), rng);
    EXPECT_EQ(out.size(), n);
    const auto m = multiplicities(out);
    EXPECT_EQ(m.size(), p);
    int lo = 1 << 30, hi = 0;
    for (const auto& [t, c] : m) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    EXPECT_LE(hi - lo, 1);
  }
}

TEST(BalancePositives, EmptyPositivesIsDomainError) {
  Rng rng(5);
  EXPECT_THROW(balance_positives(TripleSet({}, 1, 1), distinct_triples(3), rng),
               DomainError);
}

// ---------------------------------------------------------------------------
// Folds and subsampling

TEST(AssignFolds, BalancedAndSeeded) {
  Rng a(9), b(9);
  const auto f = assign_folds(1003, 10, a);
  EXPECT_EQ(f, assign_folds(1003, 10, b));
  std::vector<int> sizes(10);
  for (int k : f) ++sizes.at(static_cast<std::size_t>(k));
  for (int s : sizes) EXPECT_TRUE(s == 100 || s == 101);
}

TEST(Subsample, KeepsRequestedFractionInOrder) {
  Rng rng(5);
  const auto all = distinct_triples(200);
  const auto part = subsample(all, 0.05, rng);
  ASSERT_EQ(part.size(), 10u);
  for (std::size_t i = 1; i < part.size(); ++i)
    EXPECT_LT(part[i - 1].head, part[i].head);
}

// ---------------------------------------------------------------------------
// Relation categories

TEST(ClassifyRelations, BijectionIsOneToOne) {
  const TripleSet s({{0, 0, 1}, {1, 0, 2}, {2, 0, 0}}, 3, 1);
  EXPECT_EQ(classify_relations(s).at(0), RelationCategory::kOneToOne);
}

TEST(ClassifyRelations, OneHeadManyTails) {
  // (a,r,x), (a,r,y), (a,r,z): 1 head per tail, 3 tails per head.
  const TripleSet s({{0, 0, 1}, {0, 0, 2}, {0, 0, 3}}, 4, 1);
  const auto c = classify_relations(s);
  EXPECT_DOUBLE_EQ(c.heads_per_tail(0), 1.0);
  EXPECT_DOUBLE_EQ(c.tails_per_head(0), 3.0);
  EXPECT_EQ(c.at(0), RelationCategory::kOneToMany);
  EXPECT_EQ(to_string(c.at(0)), "1-M");
}

TEST(ClassifyRelations, ManyToOneAndManyToMany) {
  const TripleSet s({{1, 0, 0}, {2, 0, 0}, {3, 0, 0},   // M-1
                     {0, 1, 0}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}},  // M-M
                    4, 2);
  const auto c = classify_relations(s);
  EXPECT_EQ(c.at(0), RelationCategory::kManyToOne);
  EXPECT_EQ(c.at(1), RelationCategory::kManyToMany);
  const auto sizes = c.sizes();
  EXPECT_EQ(sizes, (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(ClassifyRelations, ThresholdIsStrictlyBelowOneAndAHalf) {
  // 3 distinct pairs over 2 tails: 1.5 heads per tail -> "M".
  const TripleSet s({{0, 0, 0}, {1, 0, 0}, {2, 0, 1}}, 3, 1);
  const auto c = classify_relations(s);
  EXPECT_DOUBLE_EQ(c.heads_per_tail(0), 1.5);
  EXPECT_EQ(c.at(0), RelationCategory::kManyToOne);
}

TEST(ClassifyRelations, IgnoresNegativesAndDuplicates) {
  const TripleSet s({{0, 0, 1}, {0, 0, 1}, {2, 0, 1}}, 3, 1,
                    std::vector<bool>{true, true, false});
  EXPECT_EQ(classify_relations(s).at(0), RelationCategory::kOneToOne);
}

TEST(ClassifyRelations, InvariantUnderPermutation) {
  Rng rng(21);
  const auto kb = testing::random_kb(12, 4, 80, rng);
  std::vector<Triple> shuffled(kb.begin(), kb.end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = classify_relations(kb);
  const auto b = classify_relations(TripleSet(shuffled, 12, 4));
  for (std::int32_t l = 0; l < 4; ++l) {
    EXPECT_EQ(a.at(l), b.at(l));
    EXPECT_EQ(a.heads_per_tail(l), b.heads_per_tail(l));
  }
}

TEST(ClassifyRelations, AbsentRelationIsDomainError) {
  const TripleSet s({{0, 0, 1}}, 2, 2);
  const auto c = classify_relations(s);
  EXPECT_FALSE(c.contains(1));
  EXPECT_THROW(c.at(1), DomainError);
}

}  // namespace
}  // namespace tatec
