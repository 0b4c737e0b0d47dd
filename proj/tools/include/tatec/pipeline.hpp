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

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tatec/checkpoint.hpp"
#include "tatec/kbdata.hpp"
#include "tatec/lincomb.hpp"
#include "tatec/training.hpp"

namespace tatec {

/// A preset name, or else a path to a `key = value` config file.
TrainConfig resolve_config(const std::string& spec);

/// k-fold protocol over one triple set: fold k is the test set, fold k+1
/// (cyclically) the validation set, the remaining folds the training set.
struct FoldSplit {
  TripleSet train;
  TripleSet valid;
  TripleSet test;
};

FoldSplit make_fold(const TripleSet& all, const std::vector<int>& fold_of,
                    int fold, int folds);

/// A training run's outcome: the best model on validation plus one log line
/// per validation point.
struct TrainOutcome {
  Model model;
  std::vector<std::string> log;
  double best_metric = 0.0;
};

struct PipelineOptions {
  /// Known positives for filtered validation ranking.
  const TripleSet* known = nullptr;
  /// Ready-made constituents; otherwise they are trained from
  /// cfg.pretrain_bigram / cfg.pretrain_trigram.
  std::optional<Model> bigram;
  std::optional<Model> trigram;
  /// Receives each log line as it is produced.
  std::function<void(const std::string&)> on_log;
  /// Passed through to fit() for the final stage.
  BatchObserver observer;
};

/// Trains any model kind. tatec_ft and tatec_lc first obtain their
/// constituents (trained with the same seed, data and thread count), then
/// fine-tune (ft) or fit the combination weights (lc).
TrainOutcome train_pipeline(const TrainConfig& cfg, const TripleSet& train,
                            const TripleSet& valid,
                            const PipelineOptions& options = {});

/// Loads a dataset directory written by `prepare`: triples.tsv and, when
/// present, folds.txt.
struct PreparedData {
  LoadedTriples data;
  std::vector<int> fold_of;
  int folds = 0;
};

PreparedData load_prepared(const std::string& dir);

std::vector<int> read_folds(const std::string& path, std::size_t n);

}  // namespace tatec
