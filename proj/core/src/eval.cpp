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

#include "tatec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tatec/errors.hpp"

namespace tatec {

namespace {

std::size_t idx(std::int32_t i) { return static_cast<std::size_t>(i); }

struct Counts {
  std::size_t higher = 0;
  std::size_t tied = 0;
};

std::size_t midrank(Counts c) { return 1 + c.higher + c.tied / 2; }

void tally(double candidate, double target, Counts& c) {
  if (candidate > target)
    ++c.higher;
  else if (candidate == target)
    ++c.tied;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scorer defaults

void Scorer::score_tails(std::int32_t head, std::int32_t label,
                         std::span<double> out) const {
  for (std::size_t x = 0; x < out.size(); ++x)
    out[x] = score({head, label, static_cast<std::int32_t>(x)});
}

void Scorer::score_heads(std::int32_t label, std::int32_t tail,
                         std::span<double> out) const {
  for (std::size_t x = 0; x < out.size(); ++x)
    out[x] = score({static_cast<std::int32_t>(x), label, tail});
}

void Scorer::score_labels(std::int32_t head, std::int32_t tail,
                          std::span<double> out) const {
  for (std::size_t l = 0; l < out.size(); ++l)
    out[l] = score({head, static_cast<std::int32_t>(l), tail});
}

// ---------------------------------------------------------------------------
// Ranking

std::size_t rank_among(std::span<const double> scores, std::size_t target,
                       const std::function<bool(std::size_t)>& excluded) {
  if (target >= scores.size()) throw DomainError("rank target out of range");
  Counts c;
  for (std::size_t x = 0; x < scores.size(); ++x) {
    if (x == target || (excluded && excluded(x))) continue;
    tally(scores[x], scores[target], c);
  }
  return midrank(c);
}

namespace {

struct SideRanks {
  std::size_t raw;
  std::size_t filtered;
};

SideRanks rank_side(const Scorer& scorer, const Triple& t, Side side,
                    const TripleSet* known, std::vector<double>& buffer) {
  buffer.resize(idx(scorer.num_entities()));
  std::size_t target;
  std::span<const std::int32_t> others;
  if (side == Side::kHead) {
    scorer.score_heads(t.label, t.tail, buffer);
    target = idx(t.head);
    if (known) others = known->heads(t.label, t.tail);
  } else {
    scorer.score_tails(t.head, t.label, buffer);
    target = idx(t.tail);
    if (known) others = known->tails(t.label, t.head);
  }
  const double ts = buffer[target];
  Counts all;
  for (std::size_t x = 0; x < buffer.size(); ++x)
    if (x != target) tally(buffer[x], ts, all);
  Counts removed;
  for (auto x : others)
    if (idx(x) != target) tally(buffer[idx(x)], ts, removed);
  return {midrank(all),
          midrank({all.higher - removed.higher, all.tied - removed.tied})};
}

}  // namespace

std::size_t rank_entity(const Scorer& scorer, const Triple& t, Side side,
                        RankMode mode, const TripleSet* known) {
  if (mode == RankMode::kFiltered && known == nullptr)
    throw DomainError("filtered ranking needs the set of known triples");
  std::vector<double> buffer;
  const auto r = rank_side(scorer, t, side,
                           mode == RankMode::kFiltered ? known : nullptr,
                           buffer);
  return mode == RankMode::kFiltered ? r.filtered : r.raw;
}

std::size_t rank_label(const Scorer& scorer, const Triple& t) {
  std::vector<double> scores(idx(scorer.num_relations()));
  scorer.score_labels(t.head, t.tail, scores);
  return rank_among(scores, idx(t.label));
}

std::size_t label_hit_threshold(std::int32_t num_relations, double pct) {
  const auto k = static_cast<std::size_t>(
      std::floor(pct / 100.0 * static_cast<double>(num_relations)));
  return std::max<std::size_t>(k, 1);
}

double auc_pr(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size())
    throw DomainError("auc_pr: scores and labels differ in length");
  const auto positives =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0 || positives == labels.size())
    throw DomainError("auc_pr needs at least one positive and one negative");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return scores[a] > scores[b];
  });
  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = -1.0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]])
        ++tp;
      else
        ++fp;
      ++j;
    }
    const double recall =
        static_cast<double>(tp) / static_cast<double>(positives);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (prev_precision < 0.0) prev_precision = precision;
    area += (recall - prev_recall) * (precision + prev_precision) / 2.0;
    prev_recall = recall;
    prev_precision = precision;
    i = j;
  }
  return area;
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) fn(i);
    });
  for (auto& th : workers) th.join();
}

// ---------------------------------------------------------------------------
// Link prediction

EntityRanks compute_entity_ranks(const Scorer& scorer, const TripleSet& test,
                                 const TripleSet* known, std::size_t threads) {
  EntityRanks r;
  const auto n = test.size();
  r.head_raw.resize(n);
  r.head_filtered.resize(n);
  r.tail_raw.resize(n);
  r.tail_filtered.resize(n);
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::vector<double>> buffers(threads);
  std::vector<std::thread> workers;
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += threads) {
      const auto h = rank_side(scorer, test[i], Side::kHead, known, buffers[w]);
      const auto t = rank_side(scorer, test[i], Side::kTail, known, buffers[w]);
      r.head_raw[i] = h.raw;
      r.head_filtered[i] = h.filtered;
      r.tail_raw[i] = t.raw;
      r.tail_filtered[i] = t.filtered;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    for (std::size_t w = 0; w < threads; ++w) workers.emplace_back(work, w);
    for (auto& th : workers) th.join();
  }
  return r;
}

namespace {

// Accumulates ranks of one side (or both) over a subset of test triples.
struct RankSums {
  std::size_t count = 0;
  double raw = 0.0, filtered = 0.0;
  std::size_t hits_raw = 0, hits_filtered = 0;

  void add(std::size_t raw_rank, std::size_t filtered_rank, std::size_t k) {
    ++count;
    raw += static_cast<double>(raw_rank);
    filtered += static_cast<double>(filtered_rank);
    hits_raw += raw_rank <= k;
    hits_filtered += filtered_rank <= k;
  }

  RankMetrics metrics() const {
    RankMetrics m;
    m.count = count;
    if (count == 0) return m;
    const double n = static_cast<double>(count);
    m.mean_rank_raw = raw / n;
    m.mean_rank_filtered = filtered / n;
    m.hits_raw = 100.0 * static_cast<double>(hits_raw) / n;
    m.hits_filtered = 100.0 * static_cast<double>(hits_filtered) / n;
    return m;
  }
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) /
             static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

}  // namespace

EvalReport eval_link_prediction(const Scorer& scorer, const TripleSet& test,
                                const TripleSet* known,
                                const LinkPredictionOptions& options) {
  if (test.empty()) throw DomainError("empty test set");
  const auto ranks =
      compute_entity_ranks(scorer, test, known, options.threads);
  const std::size_t k = options.k;

  EvalReport report;
  report.num_triples = test.size();
  report.k = k;
  report.seed = options.seed;

  RankSums total;
  for (std::size_t i = 0; i < test.size(); ++i) {
    total.add(ranks.head_raw[i], ranks.head_filtered[i], k);
    total.add(ranks.tail_raw[i], ranks.tail_filtered[i], k);
  }
  const auto overall = total.metrics();
  report.mean_rank_raw = overall.mean_rank_raw;
  report.mean_rank_filtered = overall.mean_rank_filtered;
  report.hits_at_k_raw = overall.hits_raw;
  report.hits_at_k_filtered = overall.hits_filtered;

  if (options.train != nullptr) {
    const RelationCategories categories(*options.train);
    std::map<std::string, std::pair<RankSums, RankSums>> sums;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const auto label = test[i].label;
      const std::string name =
          categories.contains(label)
              ? std::string(to_string(categories.at(label)))
              : std::string("unseen");
      auto& [head, tail] = sums[name];
      head.add(ranks.head_raw[i], ranks.head_filtered[i], k);
      tail.add(ranks.tail_raw[i], ranks.tail_filtered[i], k);
    }
    for (const auto& [name, s] : sums)
      report.per_category[name] = {s.first.metrics(), s.second.metrics()};
  }

  if (options.subsample) {
    constexpr int kRepetitions = 5;
    constexpr std::size_t kParts = 4;
    Rng rng(options.seed);
    std::vector<double> mr_raw, mr_filtered, h_raw, h_filtered;
    std::vector<std::size_t> order(test.size());
    std::iota(order.begin(), order.end(), 0);
    for (int rep = 0; rep < kRepetitions; ++rep) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t part = 0; part < kParts; ++part) {
        const std::size_t lo = part * order.size() / kParts;
        const std::size_t hi = (part + 1) * order.size() / kParts;
        RankSums s;
        for (std::size_t j = lo; j < hi; ++j) {
          const auto i = order[j];
          s.add(ranks.head_raw[i], ranks.head_filtered[i], k);
          s.add(ranks.tail_raw[i], ranks.tail_filtered[i], k);
        }
        if (s.count == 0) continue;
        const auto m = s.metrics();
        mr_raw.push_back(m.mean_rank_raw);
        mr_filtered.push_back(m.mean_rank_filtered);
        h_raw.push_back(m.hits_raw);
        h_filtered.push_back(m.hits_filtered);
      }
    }
    report.subsample["mean_rank_raw"] = mean_std(mr_raw);
    report.subsample["mean_rank_filtered"] = mean_std(mr_filtered);
    report.subsample["hits_at_k_raw"] = mean_std(h_raw);
    report.subsample["hits_at_k_filtered"] = mean_std(h_filtered);
  }
  return report;
}

LabelMetrics eval_label_prediction(const Scorer& scorer, const TripleSet& test,
                                   double pct, std::size_t threads) {
  if (test.empty()) throw DomainError("empty test set");
  if (scorer.num_relations() < 2)
    throw DomainError("label prediction needs at least 2 relations");
  std::vector<std::size_t> ranks(test.size());
  parallel_for(test.size(), threads,
               [&](std::size_t i) { ranks[i] = rank_label(scorer, test[i]); });
  LabelMetrics m;
  m.threshold = label_hit_threshold(scorer.num_relations(), pct);
  double sum = 0.0;
  std::size_t hits = 0;
  for (auto r : ranks) {
    sum += static_cast<double>(r);
    hits += r <= m.threshold;
  }
  m.mean_rank = sum / static_cast<double>(ranks.size());
  m.hits = 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
  return m;
}

double eval_classification(const Scorer& scorer, const TripleSet& test,
                           std::size_t threads) {
  if (!test.has_truth())
    throw DomainError("classification needs truth-labeled triples");
  std::vector<double> scores(test.size());
  parallel_for(test.size(), threads,
               [&](std::size_t i) { scores[i] = scorer.score(test[i]); });
  std::unique_ptr<bool[]> labels(new bool[test.size()]);
  for (std::size_t i = 0; i < test.size(); ++i) labels[i] = test.truth(i);
  return auc_pr(scores, std::span<const bool>(labels.get(), test.size()));
}

TripleSet stratified_sample(const TripleSet& set, std::size_t n, Rng& rng) {
  if (n == 0 || n >= set.size()) return set;
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < set.size(); ++i)
    (set.truth(i) ? pos : neg).push_back(i);
  const auto take_pos = static_cast<std::size_t>(std::llround(
      static_cast<double>(n) * static_cast<double>(pos.size()) /
      static_cast<double>(set.size())));
  const std::size_t take_neg = n - std::min(n, take_pos);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> chosen(pos.begin(),
                                  pos.begin() + std::min(take_pos, pos.size()));
  chosen.insert(chosen.end(), neg.begin(),
                neg.begin() + std::min(take_neg, neg.size()));
  std::sort(chosen.begin(), chosen.end());
  return set.subset(chosen);
}

// ---------------------------------------------------------------------------
// Validator

std::string_view to_string(ValidationMetric m) {
  switch (m) {
    case ValidationMetric::kAucPr:
      return "auc_pr";
    case ValidationMetric::kFilteredMeanRank:
      return "filtered_mean_rank";
    case ValidationMetric::kRawMeanRank:
      return "raw_mean_rank";
    case ValidationMetric::kLabelMeanRank:
      return "label_mean_rank";
  }
  return "?";
}

ValidationMetric parse_validation_metric(std::string_view s) {
  for (auto m : {ValidationMetric::kAucPr, ValidationMetric::kFilteredMeanRank,
                 ValidationMetric::kRawMeanRank,
                 ValidationMetric::kLabelMeanRank})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown validation metric '" + std::string(s) + "'");
}

bool higher_is_better(ValidationMetric m) {
  return m == ValidationMetric::kAucPr;
}

Validator::Validator(const TripleSet& valid, ValidationMetric metric,
                     std::size_t sample, const TripleSet* known, Rng& rng,
                     std::size_t threads)
    : metric_(metric), known_(known), threads_(threads) {
  if (valid.empty()) throw DomainError("empty validation set");
  if (metric == ValidationMetric::kAucPr) {
    if (!valid.has_truth())
      throw ConfigError("auc_pr validation needs truth-labeled triples");
    sample_ = stratified_sample(valid, sample, rng);
  } else {
    const auto positives = valid.positives();
    if (sample == 0 || sample >= positives.size()) {
      sample_ = positives;
    } else {
      std::vector<std::size_t> order(positives.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(sample);
      std::sort(order.begin(), order.end());
      sample_ = positives.subset(order);
    }
  }
  if (metric == ValidationMetric::kFilteredMeanRank && known_ == nullptr)
    throw ConfigError("filtered validation needs the set of known triples");
}

double Validator::evaluate(const Model& model) const {
  const ModelScorer scorer(model);
  switch (metric_) {
    case ValidationMetric::kAucPr:
      return eval_classification(scorer, sample_, threads_);
    case ValidationMetric::kLabelMeanRank:
      return eval_label_prediction(scorer, sample_, 5.0, threads_).mean_rank;
    case ValidationMetric::kFilteredMeanRank:
    case ValidationMetric::kRawMeanRank: {
      const auto ranks = compute_entity_ranks(scorer, sample_, known_, threads_);
      const bool filtered = metric_ == ValidationMetric::kFilteredMeanRank;
      double sum = 0.0;
      for (std::size_t i = 0; i < sample_.size(); ++i)
        sum += static_cast<double>(filtered ? ranks.head_filtered[i]
                                            : ranks.head_raw[i]) +
               static_cast<double>(filtered ? ranks.tail_filtered[i]
                                            : ranks.tail_raw[i]);
      return sum / (2.0 * static_cast<double>(sample_.size()));
    }
  }
  return 0.0;
}

bool Validator::better(double candidate, double incumbent) const {
  return higher_is_better(metric_) ? candidate > incumbent
                                   : candidate < incumbent;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json to_json_value(const RankMetrics& m) {
  return {{"count", m.count},
          {"mean_rank_raw", m.mean_rank_raw},
          {"mean_rank_filtered", m.mean_rank_filtered},
          {"hits_raw", m.hits_raw},
          {"hits_filtered", m.hits_filtered}};
}

RankMetrics rank_metrics_from(const nlohmann::json& j) {
  RankMetrics m;
  m.count = j.at("count").get<std::size_t>();
  m.mean_rank_raw = j.at("mean_rank_raw").get<double>();
  m.mean_rank_filtered = j.at("mean_rank_filtered").get<double>();
  m.hits_raw = j.at("hits_raw").get<double>();
  m.hits_filtered = j.at("hits_filtered").get<double>();
  return m;
}

}  // namespace

std::string to_text(const EvalReport& r) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "num_triples: " << r.num_triples << '\n';
  if (r.num_triples > 0) {
    out << "k: " << r.k << '\n';
    out << "mean_rank_raw: " << r.mean_rank_raw << '\n';
    out << "mean_rank_filtered: " << r.mean_rank_filtered << '\n';
    out << "hits_at_k_raw: " << r.hits_at_k_raw << '\n';
    out << "hits_at_k_filtered: " << r.hits_at_k_filtered << '\n';
  }
  if (r.auc_pr) out << "auc_pr: " << *r.auc_pr << '\n';
  if (r.label_mean_rank) out << "label_mean_rank: " << *r.label_mean_rank << '\n';
  if (r.hits_at_5pct) out << "hits_at_5pct: " << *r.hits_at_5pct << '\n';
  if (r.label_threshold) out << "label_threshold: " << *r.label_threshold << '\n';
  for (const auto& [name, ms] : r.subsample)
    out << "subsample." << name << ": " << ms.mean << " +- " << ms.std << '\n';
  out << "seed: " << r.seed << '\n';
  if (!r.per_category.empty()) {
    out << '\n';
    out << "category\tside\tcount\tmr_raw\tmr_filtered\thits_raw\thits_filtered\n";
    for (const auto& [name, c] : r.per_category)
      for (const auto& [side, m] :
           {std::pair{"head", c.head}, std::pair{"tail", c.tail}})
        out << name << '\t' << side << '\t' << m.count << '\t'
            << m.mean_rank_raw << '\t' << m.mean_rank_filtered << '\t'
            << m.hits_raw << '\t' << m.hits_filtered << '\n';
  }
  return out.str();
}

std::string to_json(const EvalReport& r) {
  nlohmann::json j;
  j["num_triples"] = r.num_triples;
  j["k"] = r.k;
  j["mean_rank_raw"] = r.mean_rank_raw;
  j["mean_rank_filtered"] = r.mean_rank_filtered;
  j["hits_at_k_raw"] = r.hits_at_k_raw;
  j["hits_at_k_filtered"] = r.hits_at_k_filtered;
  j["auc_pr"] = r.auc_pr ? nlohmann::json(*r.auc_pr) : nlohmann::json();
  j["label_mean_rank"] =
      r.label_mean_rank ? nlohmann::json(*r.label_mean_rank) : nlohmann::json();
  j["hits_at_5pct"] =
      r.hits_at_5pct ? nlohmann::json(*r.hits_at_5pct) : nlohmann::json();
  j["label_threshold"] =
      r.label_threshold ? nlohmann::json(*r.label_threshold) : nlohmann::json();
  j["per_category"] = nlohmann::json::object();
  for (const auto& [name, c] : r.per_category)
    j["per_category"][name] = {{"head", to_json_value(c.head)},
                               {"tail", to_json_value(c.tail)}};
  j["subsample"] = nlohmann::json::object();
  for (const auto& [name, ms] : r.subsample)
    j["subsample"][name] = {{"mean", ms.mean}, {"std", ms.std}};
  j["seed"] = r.seed;
  return j.dump(2);
}

EvalReport report_from_json(std::string_view text) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.num_triples = j.at("num_triples").get<std::size_t>();
    r.k = j.at("k").get<std::size_t>();
    r.mean_rank_raw = j.at("mean_rank_raw").get<double>();
    r.mean_rank_filtered = j.at("mean_rank_filtered").get<double>();
    r.hits_at_k_raw = j.at("hits_at_k_raw").get<double>();
    r.hits_at_k_filtered = j.at("hits_at_k_filtered").get<double>();
    if (!j.at("auc_pr").is_null()) r.auc_pr = j["auc_pr"].get<double>();
    if (!j.at("label_mean_rank").is_null())
      r.label_mean_rank = j["label_mean_rank"].get<double>();
    if (!j.at("hits_at_5pct").is_null())
      r.hits_at_5pct = j["hits_at_5pct"].get<double>();
    if (!j.at("label_threshold").is_null())
      r.label_threshold = j["label_threshold"].get<std::size_t>();
    for (const auto& [name, c] : j.at("per_category").items())
      r.per_category[name] = {rank_metrics_from(c.at("head")),
                              rank_metrics_from(c.at("tail"))};
    for (const auto& [name, ms] : j.at("subsample").items())
      r.subsample[name] = {ms.at("mean").get<double>(),
                           ms.at("std").get<double>()};
    r.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace tatec
