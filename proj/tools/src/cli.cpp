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

#include "tatec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tatec/checkpoint.hpp"
#include "tatec/config.hpp"
#include "tatec/errors.hpp"
#include "tatec/eval.hpp"
#include "tatec/kbdata.hpp"
#include "tatec/pipeline.hpp"

namespace fs = std::filesystem;

namespace tatec {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::vector<RawTriple> read_raw(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_triples(in);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// Indexes several files against one vocabulary.
std::vector<TripleSet> index_files(const std::vector<std::string>& paths,
                                   Vocab& vocab, VocabMode mode) {
  std::vector<std::vector<RawTriple>> raw;
  for (const auto& p : paths) raw.push_back(read_raw(p));
  std::vector<TripleSet> sets;
  for (const auto& r : raw) sets.push_back(index_triples(r, vocab, mode));
  // Earlier sets were sized before later files added names; re-size them.
  for (auto& s : sets)
    s = TripleSet(std::vector<Triple>(s.begin(), s.end()),
                  vocab.num_entities(), vocab.num_relations(),
                  s.has_truth() ? std::optional<std::vector<bool>>([&] {
                    std::vector<bool> t(s.size());
                    for (std::size_t i = 0; i < s.size(); ++i) t[i] = s.truth(i);
                    return t;
                  }())
                                : std::nullopt);
  return sets;
}

TripleSet union_of(const std::vector<const TripleSet*>& parts) {
  return TripleSet::concat(parts).positives();
}

// ---------------------------------------------------------------------------

struct PrepareArgs {
  std::vector<std::string> inputs;
  std::string out;
  bool complete = false;
  int folds = 0;
  double subsample = 1.0;
  std::uint64_t seed = 1;
  bool materialize = false;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out) {
  Vocab vocab;
  auto sets = index_files(a.inputs, vocab, VocabMode::kBuild);
  Rng rng(a.seed);
  if (a.subsample < 1.0)
    for (auto& s : sets) s = subsample(s, a.subsample, rng);
  fs::create_directories(a.out);

  std::vector<std::string> names;
  if (sets.size() == 1) {
    names.push_back("triples.tsv");
  } else {
    for (const auto& p : a.inputs) names.push_back(fs::path(p).filename());
    if (a.complete || a.folds > 0)
      throw ConfigError("--complete and --folds take a single --input");
  }
  if (a.complete) sets[0] = complete_tensor(sets[0].positives());

  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto f = open_out(a.out + "/" + names[i]);
    write_triples(f, sets[i], vocab);
    out << names[i] << ": " << sets[i].size() << " triples\n";
  }
  {
    auto f = open_out(a.out + "/entities.txt");
    write_vocab(f, vocab.entities());
    auto g = open_out(a.out + "/relations.txt");
    write_vocab(g, vocab.relations());
  }
  out << "entities: " << vocab.num_entities() << '\n'
      << "relations: " << vocab.num_relations() << '\n';

  if (a.folds > 0) {
    const auto fold_of = assign_folds(sets[0].size(), a.folds, rng);
    auto f = open_out(a.out + "/folds.txt");
    for (int k : fold_of) f << k << '\n';
    out << "folds: " << a.folds << '\n';
    if (a.materialize) {
      for (int k = 0; k < a.folds; ++k) {
        const auto split = make_fold(sets[0], fold_of, k, a.folds);
        const auto dir = a.out + "/fold_" + std::to_string(k);
        fs::create_directories(dir);
        for (const auto& [name, set] :
             {std::pair{"train.tsv", &split.train},
              std::pair{"valid.tsv", &split.valid},
              std::pair{"test.tsv", &split.test}}) {
          auto g = open_out(dir + "/" + name);
          write_triples(g, *set, vocab);
        }
      }
    }
  }
  out << "seed: " << a.seed << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DataArgs {
  std::string train, valid, test, dir;
  std::vector<std::string> known;
  int fold = -1;
};

struct Dataset {
  Vocab vocab;
  std::optional<TripleSet> train, valid, test;
  TripleSet known;  // every positive available for filtering
};

Dataset load_dataset(const DataArgs& d, const Vocab* reuse, bool need_train,
                     bool need_test) {
  Dataset ds;
  if (!d.dir.empty()) {
    auto prepared = load_prepared(d.dir);
    if (reuse) {
      auto in = open_in(d.dir + "/triples.tsv");
      prepared.data = load_triples(in, *reuse);
    }
    ds.vocab = prepared.data.vocab;
    if (prepared.folds == 0) throw DataError(d.dir + " has no folds.txt");
    if (d.fold < 0) throw ConfigError("--data needs --fold");
    auto split =
        make_fold(prepared.data.triples, prepared.fold_of, d.fold, prepared.folds);
    ds.known = prepared.data.triples.positives();
    ds.train = std::move(split.train);
    ds.valid = std::move(split.valid);
    ds.test = std::move(split.test);
    return ds;
  }
  std::vector<std::string> paths;
  std::vector<std::optional<TripleSet>*> slots;
  if (need_train) {
    if (d.train.empty() || d.valid.empty())
      throw ConfigError("training needs --train and --valid (or --data)");
  }
  if (need_test && d.test.empty())
    throw ConfigError("evaluation needs --test (or --data)");
  for (auto [path, slot] : {std::pair{&d.train, &ds.train},
                            std::pair{&d.valid, &ds.valid},
                            std::pair{&d.test, &ds.test}}) {
    if (path->empty()) continue;
    paths.push_back(*path);
    slots.push_back(slot);
  }
  for (const auto& k : d.known) paths.push_back(k);
  Vocab vocab = reuse ? *reuse : Vocab();
  auto sets =
      index_files(paths, vocab, reuse ? VocabMode::kReuse : VocabMode::kBuild);
  std::vector<const TripleSet*> parts;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i < slots.size()) *slots[i] = sets[i];
    parts.push_back(&sets[i]);
  }
  ds.known = union_of(parts);
  ds.vocab = std::move(vocab);
  return ds;
}

void add_data_options(CLI::App* app, DataArgs& d) {
  app->add_option("--train", d.train, "training triples (TSV)");
  app->add_option("--valid", d.valid, "validation triples (TSV)");
  app->add_option("--test", d.test, "test triples (TSV)");
  app->add_option("--known", d.known,
                  "further known positives, used for filtering");
  app->add_option("--data", d.dir, "directory written by `prepare`");
  app->add_option("--fold", d.fold, "fold of --data to use");
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string preset, config, out;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string bigram, trigram;
  DataArgs data;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  TrainConfig cfg;
  if (!a.preset.empty() && !a.config.empty())
    throw ConfigError("give either --preset or --config, not both");
  if (!a.preset.empty())
    cfg = preset(a.preset);
  else if (!a.config.empty())
    cfg = resolve_config(a.config);
  else
    throw ConfigError("train needs --preset or --config");
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;
  cfg.validate();

  const Dataset ds = load_dataset(a.data, nullptr, true, false);
  PipelineOptions opt;
  opt.known = &ds.known;
  if (!a.quiet) opt.on_log = [&](const std::string& l) { out << l << '\n'; };
  if (!a.bigram.empty()) {
    auto c = load_checkpoint(a.bigram);
    check_vocab_matches(c, ds.vocab);
    opt.bigram = std::move(c.model);
  }
  if (!a.trigram.empty()) {
    auto c = load_checkpoint(a.trigram);
    check_vocab_matches(c, ds.vocab);
    opt.trigram = std::move(c.model);
  }
  auto result = train_pipeline(cfg, *ds.train, *ds.valid, opt);

  Checkpoint ckpt{std::move(result.model), ds.vocab, cfg, cfg.seed};
  save_checkpoint(a.out, ckpt);
  {
    auto log = open_out(a.out + ".log");
    for (const auto& l : result.log) log << l << '\n';
    auto conf = open_out(a.out + ".config");
    conf << to_config_text(cfg);
  }
  out << "checkpoint: " << a.out << '\n'
      << "best_" << to_string(cfg.validation_metric) << ": "
      << std::setprecision(10) << result.best_metric << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint, out, task = "auto";
  DataArgs data;
  std::size_t topk = 10;
  std::size_t threads = 1;
  std::uint64_t seed = 1;
  bool subsample = false;
  bool json = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto ckpt = load_checkpoint(a.checkpoint);
  const Dataset ds = load_dataset(a.data, &ckpt.vocab, false, true);
  const ModelScorer scorer(ckpt.model);
  const TripleSet& test = *ds.test;

  std::string task = a.task;
  if (task == "auto") task = test.has_truth() ? "classify" : "link";
  EvalReport report;
  report.seed = a.seed;
  if (task == "classify") {
    report.num_triples = 0;
    report.auc_pr = eval_classification(scorer, test, a.threads);
    if (a.subsample) {
      // Same protocol as for ranking: 4 disjoint subsets, 5 repetitions.
      Rng rng(a.seed);
      std::vector<double> values;
      for (int rep = 0; rep < 5; ++rep) {
        const auto fold_of = assign_folds(test.size(), 4, rng);
        for (int f = 0; f < 4; ++f) {
          std::vector<std::size_t> idx;
          for (std::size_t i = 0; i < test.size(); ++i)
            if (fold_of[i] == f) idx.push_back(i);
          const auto part = test.subset(idx);
          try {
            values.push_back(eval_classification(scorer, part, a.threads));
          } catch (const DomainError&) {
            // single-class subset: no curve
          }
        }
      }
      if (values.size() >= 2) {
        const double n = static_cast<double>(values.size());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        report.subsample["auc_pr"] = {mean, std::sqrt(ss / (n - 1.0))};
      }
    }
  } else if (task == "link") {
    LinkPredictionOptions lo;
    lo.k = a.topk;
    lo.subsample = a.subsample;
    lo.seed = a.seed;
    lo.threads = a.threads;
    if (ds.train) lo.train = &*ds.train;
    report = eval_link_prediction(scorer, test.positives(), &ds.known, lo);
  } else if (task == "label") {
    const auto m = eval_label_prediction(scorer, test.positives(), 5.0, a.threads);
    report.seed = a.seed;
    report.label_mean_rank = m.mean_rank;
    report.hits_at_5pct = m.hits;
    report.label_threshold = m.threshold;
  } else {
    throw ConfigError("unknown --task '" + task +
                      "' (auto, link, label, classify)");
  }
  const auto text = to_text(report);
  const auto json = to_json(report);
  out << (a.json ? json + "\n" : text);
  if (!a.out.empty()) {
    open_out(a.out + ".txt") << text;
    open_out(a.out + ".json") << json << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint, head, relation, tail;
  std::vector<std::string> known;
  std::size_t topk = 10;
  bool filtered = false;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const auto ckpt = load_checkpoint(a.checkpoint);
  const Model& m = ckpt.model;
  const Vocab& v = ckpt.vocab;
  const int missing =
      int(a.head.empty()) + int(a.relation.empty()) + int(a.tail.empty());
  if (missing != 1)
    throw ConfigError(
        "give exactly two of --head, --relation, --tail; the third is predicted");
  if (a.filtered && a.known.empty())
    throw ConfigError("--filtered needs --known files of positives");

  std::optional<TripleSet> known;
  if (a.filtered) {
    Vocab reuse = v;
    auto sets = index_files(a.known, reuse, VocabMode::kReuse);
    std::vector<const TripleSet*> parts;
    for (const auto& s : sets) parts.push_back(&s);
    known = union_of(parts);
  }

  std::vector<double> scores;
  std::vector<Triple> candidates;
  if (a.tail.empty()) {
    const Triple q{v.entity_index(a.head), v.relation_index(a.relation), 0};
    scores.resize(static_cast<std::size_t>(m.num_entities()));
    m.score_tails(q.head, q.label, scores);
    for (std::int32_t x = 0; x < m.num_entities(); ++x)
      candidates.push_back({q.head, q.label, x});
  } else if (a.head.empty()) {
    const Triple q{0, v.relation_index(a.relation), v.entity_index(a.tail)};
    scores.resize(static_cast<std::size_t>(m.num_entities()));
    m.score_heads(q.label, q.tail, scores);
    for (std::int32_t x = 0; x < m.num_entities(); ++x)
      candidates.push_back({x, q.label, q.tail});
  } else {
    const Triple q{v.entity_index(a.head), 0, v.entity_index(a.tail)};
    scores.resize(static_cast<std::size_t>(m.num_relations()));
    m.score_labels(q.head, q.tail, scores);
    for (std::int32_t x = 0; x < m.num_relations(); ++x)
      candidates.push_back({q.head, x, q.tail});
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (!known || !known->contains(candidates[i])) order.push_back(i);
  // Ties broken by index so the listing is deterministic.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return scores[x] > scores[y];
  });
  order.resize(std::min(order.size(), a.topk));

  out << "rank\thead\trelation\ttail\tscore\n" << std::setprecision(10);
  std::size_t rank = 0;
  for (auto i : order) {
    const auto& c = candidates[i];
    out << ++rank << '\t' << v.entity_name(c.head) << '\t'
        << v.relation_name(c.label) << '\t' << v.entity_name(c.tail) << '\t'
        << scores[i] << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_inspect(const std::string& path, bool vocab, std::ostream& out) {
  auto in = open_in(path);
  const auto header = read_checkpoint_header(in);
  for (const auto& [k, val] : header) out << k << ": " << val << '\n';
  if (vocab) {
    const auto ckpt = load_checkpoint(path);
    for (const auto& e : ckpt.vocab.entities()) out << "entity: " << e << '\n';
    for (const auto& r : ckpt.vocab.relations()) out << "relation: " << r << '\n';
  }
  return kExitOk;
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::kConfig:
      return kExitConfig;
    case ErrorCategory::kData:
    case ErrorCategory::kDomain:
      return kExitData;
    case ErrorCategory::kDivergence:
      return kExitDivergence;
  }
  return kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Knowledge base completion with 2-way and 3-way embeddings",
               "tatec"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  PrepareArgs pa;
  auto* prep = app.add_subcommand("prepare", "complete, subsample and split a KB");
  prep->add_option("--input", pa.inputs, "triple files (TSV)")->required();
  prep->add_option("--out", pa.out, "output directory")->required();
  prep->add_flag("--complete", pa.complete,
                 "expand positives into the full labeled tensor");
  prep->add_option("--folds", pa.folds, "number of cross-validation folds")
      ->check(CLI::Range(3, 1000));
  prep->add_option("--subsample", pa.subsample, "fraction of triples to keep")
      ->check(CLI::Range(0.0, 1.0));
  prep->add_option("--seed", pa.seed, "random seed");
  prep->add_flag("--materialize", pa.materialize,
                 "also write fold_k/{train,valid,test}.tsv");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("--preset", ta.preset, "named hyperparameter preset");
  train->add_option("--config", ta.config, "config file or preset name");
  train->add_option("--set", ta.overrides, "override a config key (key=value)");
  train->add_option("--seed", ta.seed, "random seed");
  train->add_option("--threads", ta.threads, "worker threads for evaluation");
  train->add_option("--out", ta.out, "checkpoint path")->required();
  train->add_option("--bigram", ta.bigram, "pre-trained bigram checkpoint");
  train->add_option("--trigram", ta.trigram, "pre-trained trigram checkpoint");
  train->add_flag("--quiet", ta.quiet, "do not echo the training log");
  add_data_options(train, ta.data);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("checkpoint", ea.checkpoint)->required();
  eval->add_option("--task", ea.task, "auto, link, label or classify");
  eval->add_option("--topk", ea.topk, "k of hits@k")->check(CLI::PositiveNumber);
  eval->add_option("--threads", ea.threads)->check(CLI::PositiveNumber);
  eval->add_option("--seed", ea.seed, "seed of the subsample protocol");
  eval->add_flag("--subsample", ea.subsample,
                 "also report mean and std over 4 subsets x 5 repetitions");
  eval->add_flag("--json", ea.json, "print the JSON record instead of text");
  eval->add_option("--out", ea.out, "write <out>.txt and <out>.json");
  add_data_options(eval, ea.data);

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "rank completions of a query");
  predict->add_option("checkpoint", pr.checkpoint)->required();
  predict->add_option("--head", pr.head);
  predict->add_option("--relation", pr.relation);
  predict->add_option("--tail", pr.tail);
  predict->add_option("--topk", pr.topk)->check(CLI::PositiveNumber);
  predict->add_flag("--filtered", pr.filtered,
                    "drop completions that are known positives");
  predict->add_option("--known", pr.known, "known positives (TSV)");

  std::string inspect_path;
  bool inspect_vocab = false;
  auto* inspect = app.add_subcommand("inspect", "print a checkpoint header");
  inspect->add_option("checkpoint", inspect_path)->required();
  inspect->add_flag("--vocab", inspect_vocab, "also list the vocabulary");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*prep) return cmd_prepare(pa, out);
    if (*train) return cmd_train(ta, out);
    if (*eval) return cmd_eval(ea, out);
    if (*predict) return cmd_predict(pr, out);
    if (*inspect) return cmd_inspect(inspect_path, inspect_vocab, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace tatec
