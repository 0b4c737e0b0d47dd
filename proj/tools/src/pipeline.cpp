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

#include "tatec/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tatec/config.hpp"
#include "tatec/errors.hpp"

namespace tatec {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void emit(TrainOutcome& out, const PipelineOptions& opt, std::string line) {
  if (opt.on_log) opt.on_log(line);
  out.log.push_back(std::move(line));
}

TrainOutcome run_fit(const std::string& stage, const TrainConfig& cfg,
                     const TripleSet& train, const TripleSet& valid,
                     std::optional<Model> initial, const PipelineOptions& opt,
                     TrainOutcome& sink) {
  FitOptions fo;
  fo.initial = std::move(initial);
  fo.known = opt.known;
  if (stage == "final") fo.observer = opt.observer;
  auto result = fit(cfg, train, valid, fo);
  const auto metric = to_string(cfg.validation_metric);
  for (const auto& p : result.trace)
    emit(sink, opt,
         stage + "\tepoch " + std::to_string(p.epoch) + "\t" +
             std::string(metric) + " " + fmt(p.metric) + "\tloss " +
             fmt(p.mean_hinge_loss));
  emit(sink, opt,
       stage + "\tbest epoch " + std::to_string(result.best_epoch) + "\t" +
           std::string(metric) + " " + fmt(result.best_metric));
  TrainOutcome out;
  out.model = std::move(result.model);
  out.best_metric = result.best_metric;
  return out;
}

Model constituent(const std::string& spec, ModelKind expected,
                  const TrainConfig& parent, const TripleSet& train,
                  const TripleSet& valid, const PipelineOptions& opt,
                  TrainOutcome& sink) {
  if (spec.empty())
    throw ConfigError(std::string(to_string(parent.model_kind)) +
                      " needs pretrain_" + std::string(to_string(expected)));
  TrainConfig c = resolve_config(spec);
  if (c.model_kind != expected)
    throw ConfigError("pretrain_" + std::string(to_string(expected)) + " '" +
                      spec + "' is a " + std::string(to_string(c.model_kind)) +
                      " configuration");
  c.seed = parent.seed;
  c.threads = parent.threads;
  return run_fit(std::string(to_string(expected)), c, train, valid,
                 std::nullopt, opt, sink)
      .model;
}

}  // namespace

TrainConfig resolve_config(const std::string& spec) {
  if (is_preset(spec)) return preset(spec);
  std::ifstream in(spec);
  if (!in)
    throw ConfigError("'" + spec + "' is neither a preset nor a readable "
                      "config file");
  return parse_config(in);
}

FoldSplit make_fold(const TripleSet& all, const std::vector<int>& fold_of,
                    int fold, int folds) {
  if (fold_of.size() != all.size())
    throw DataError("fold assignment has " + std::to_string(fold_of.size()) +
                    " entries for " + std::to_string(all.size()) + " triples");
  if (folds < 3 || fold < 0 || fold >= folds)
    throw ConfigError("fold " + std::to_string(fold) + " out of range for " +
                      std::to_string(folds) + " folds");
  const int valid_fold = (fold + 1) % folds;
  std::vector<std::size_t> tr, va, te;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold)
      te.push_back(i);
    else if (fold_of[i] == valid_fold)
      va.push_back(i);
    else
      tr.push_back(i);
  }
  return {all.subset(tr), all.subset(va), all.subset(te)};
}

TrainOutcome train_pipeline(const TrainConfig& cfg, const TripleSet& train,
                            const TripleSet& valid,
                            const PipelineOptions& opt) {
  cfg.validate();
  TrainOutcome out;
  const auto kind = cfg.model_kind;
  if (kind != ModelKind::kTatecFt && kind != ModelKind::kTatecLc) {
    auto r = run_fit("final", cfg, train, valid, std::nullopt, opt, out);
    out.model = std::move(r.model);
    out.best_metric = r.best_metric;
    return out;
  }

  const Model bigram =
      opt.bigram ? *opt.bigram
                 : constituent(cfg.pretrain_bigram, ModelKind::kBigram, cfg,
                               train, valid, opt, out);
  const Model trigram =
      opt.trigram ? *opt.trigram
                  : constituent(cfg.pretrain_trigram, ModelKind::kTrigram, cfg,
                                train, valid, opt, out);

  if (kind == ModelKind::kTatecFt) {
    auto r = run_fit("final", cfg, train, valid,
                     Model::combine(kind, bigram, trigram), opt, out);
    out.model = std::move(r.model);
    out.best_metric = r.best_metric;
    return out;
  }

  Model model = Model::combine(kind, bigram, trigram, cfg.alpha, cfg.epsilon);
  Rng rng(cfg.seed);
  const Validator validator(valid, cfg.validation_metric,
                            cfg.validation_sample, opt.known, rng, cfg.threads);
  CombinationOptions co;
  co.alpha = cfg.alpha;
  co.gamma = cfg.gamma;
  co.epsilon = cfg.epsilon;
  co.corruption = cfg.corruption;
  co.observed_negatives = cfg.negative_source == NegativeSource::kObserved;
  co.threads = cfg.threads;
  const auto result = fit_combination(model, train, validator, co, rng);
  const auto metric = std::string(to_string(cfg.validation_metric));
  double best = 0.0;
  bool first = true;
  for (const auto& it : result.trace) {
    emit(out, opt,
         "final\touter " + std::to_string(it.iteration) + "\t" + metric + " " +
             fmt(it.validation) + "\tobjective " + fmt(it.objective) +
             (it.accepted ? "" : "\trejected"));
    if (first || validator.better(it.validation, best)) best = it.validation;
    first = false;
  }
  if (result.sigma_fallback)
    emit(out, opt, "final\tall weights vanished; sigma reset to uniform");
  model.weights() = result.weights;
  out.model = std::move(model);
  out.best_metric = best;
  return out;
}

std::vector<int> read_folds(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open fold file '" + path + "'");
  std::vector<int> out;
  out.reserve(n);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      const int f = std::stoi(line, &pos);
      if (pos != line.size() || f < 0) throw std::invalid_argument(line);
      out.push_back(f);
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad fold index '" + line + "'");
    }
  }
  if (out.size() != n)
    throw DataError("fold file '" + path + "' has " +
                    std::to_string(out.size()) + " entries, expected " +
                    std::to_string(n));
  return out;
}

PreparedData load_prepared(const std::string& dir) {
  PreparedData p;
  const std::string triples = dir + "/triples.tsv";
  std::ifstream in(triples);
  if (!in) throw DataError("cannot open '" + triples + "'");
  p.data = load_triples(in);
  std::ifstream probe(dir + "/folds.txt");
  if (probe) {
    p.fold_of = read_folds(dir + "/folds.txt", p.data.triples.size());
    for (int f : p.fold_of) p.folds = std::max(p.folds, f + 1);
  }
  return p;
}

}  // namespace tatec
