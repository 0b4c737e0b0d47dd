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

// Shared helpers for the test suites: random models and KBs, and naive
// reference implementations that the optimized code is checked against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tatec/eval.hpp"
#include "tatec/kbdata.hpp"
#include "tatec/scoring.hpp"
#include "tatec/training.hpp"

namespace tatec::testing {

inline constexpr ModelKind kScoredKinds[] = {
    ModelKind::kBigram,  ModelKind::kTrigram,
    ModelKind::kTatecFt, ModelKind::kTatecLc,
    ModelKind::kTransE,  ModelKind::kTatecFtShared,
};

/// Every parameter filled with uniform(-scale, scale) draws; LC weights too.
inline Model random_model(ModelKind kind, std::int32_t e, std::int32_t l,
                          std::size_t d1, std::size_t d2, Rng& rng,
                          double scale = 1.0) {
  if (kind == ModelKind::kTatecFtShared) d2 = d1;
  Model m = Model::zeros(kind, e, l, d1, d2);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (int b = 0; b < kNumBlocks; ++b)
    if (m.has_block(Block(b)))
      for (double& v : m.block(Block(b)).data()) v = u(rng);
  if (m.has_weights()) {
    auto& w = m.weights();
    for (double& v : w.delta.data()) v = u(rng);
    w.sigma.assign(static_cast<std::size_t>(l), 1.0 / l);
  }
  return m;
}

inline Triple random_triple(std::int32_t e, std::int32_t l, Rng& rng) {
  return {uniform_index(rng, e), uniform_index(rng, l), uniform_index(rng, e)};
}

/// Distinct random positives over an E x L x E tensor.
inline TripleSet random_kb(std::int32_t e, std::int32_t l, std::size_t n,
                           Rng& rng) {
  std::vector<Triple> out;
  std::vector<Triple> seen;
  while (out.size() < n) {
    const auto t = random_triple(e, l, rng);
    if (std::find(out.begin(), out.end(), t) != out.end()) continue;
    out.push_back(t);
  }
  return TripleSet(out, e, l);
}

/// The reference rank convention spelled out directly.
inline std::size_t naive_rank(const std::vector<double>& scores,
                              std::size_t target,
                              const std::vector<bool>& removed) {
  std::size_t higher = 0, tied = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == target || removed[i]) continue;
    if (scores[i] > scores[target]) ++higher;
    if (scores[i] == scores[target]) ++tied;
  }
  return 1 + higher + tied / 2;
}

/// Exhaustive head/tail ranking; no batching, no index structures.
struct NaiveLinkMetrics {
  double mr_raw = 0, mr_filtered = 0, hits_raw = 0, hits_filtered = 0;
};

inline NaiveLinkMetrics naive_link_prediction(const Scorer& s,
                                              std::span<const Triple> test,
                                              std::span<const Triple> known,
                                              std::size_t k) {
  const auto e = static_cast<std::size_t>(s.num_entities());
  auto is_known = [&](const Triple& t) {
    return std::find(known.begin(), known.end(), t) != known.end();
  };
  std::size_t sum_raw = 0, sum_f = 0, hit_raw = 0, hit_f = 0, n = 0;
  for (const auto& t : test) {
    for (int side = 0; side < 2; ++side) {
      std::vector<double> scores(e);
      std::vector<bool> none(e, false), removed(e, false);
      for (std::size_t x = 0; x < e; ++x) {
        Triple c = t;
        (side == 0 ? c.head : c.tail) = static_cast<std::int32_t>(x);
        scores[x] = s.score(c);
        removed[x] = !(c == t) && is_known(c);
      }
      const auto target =
          static_cast<std::size_t>(side == 0 ? t.head : t.tail);
      const auto r = naive_rank(scores, target, none);
      const auto f = naive_rank(scores, target, removed);
      sum_raw += r;
      sum_f += f;
      hit_raw += r <= k;
      hit_f += f <= k;
      ++n;
    }
  }
  const double dn = static_cast<double>(n);
  return {static_cast<double>(sum_raw) / dn, static_cast<double>(sum_f) / dn,
          100.0 * static_cast<double>(hit_raw) / dn,
          100.0 * static_cast<double>(hit_f) / dn};
}

/// Precision-recall area by explicit curve construction: points at every
/// distinct threshold, the first point's precision carried back to recall 0.
inline double naive_auc_pr(const std::vector<double>& scores,
                           const std::vector<bool>& labels) {
  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  const double positives =
      static_cast<double>(std::count(labels.begin(), labels.end(), true));
  std::vector<std::pair<double, double>> curve;  // (recall, precision)
  for (double th : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores[i] >= th) (labels[i] ? tp : fp) += 1;
    curve.emplace_back(tp / positives, tp / (tp + fp));
  }
  double area = 0.0;
  double r0 = 0.0, p0 = curve.front().second;
  for (const auto& [r, p] : curve) {
    area += (r - r0) * (p + p0) / 2.0;
    r0 = r;
    p0 = p;
  }
  return area;
}

#ifdef TATEC_DATA_DIR
/// Positives of a bundled dataset ("umls" or "kinships").
inline LoadedTriples load_bundled(const std::string& name) {
  std::ifstream in(std::string(TATEC_DATA_DIR) + "/" + name + "/positives.tsv");
  if (!in) throw std::runtime_error("missing bundled dataset " + name);
  return load_triples(in);
}
#endif

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tatec_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace tatec::testing
