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

#include "tatec/config.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>

#include "tatec/errors.hpp"

namespace tatec {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("bad value '" + std::string(v) + "' for key '" +
                      std::string(key) + "'");
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("bad value '" + std::string(v) + "' for key '" +
                      std::string(key) + "'");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Presets

enum class Dataset { kUmls, kKinships, kFb15k, kSvo };

// Protocol settings shared by every model of a dataset.
TrainConfig dataset_defaults(Dataset ds) {
  TrainConfig c;
  c.regularization.rho_e = 1.0;
  switch (ds) {
    case Dataset::kUmls:
    case Dataset::kKinships:
      c.negative_source = NegativeSource::kObserved;
      c.corruption = CorruptionStrategy::kAllDiffer;
      c.negatives_per_positive = 1;
      c.batch_size = 2000;
      c.epochs = 100;
      c.validation_every = 10;
      c.validation_metric = ValidationMetric::kAucPr;
      c.validation_sample = 1000;
      break;
    case Dataset::kFb15k:
      c.negative_source = NegativeSource::kCorrupt;
      c.corruption = CorruptionStrategy::kHeadOrTail;
      c.negatives_per_positive = 2;
      c.batch_size = 5000;
      c.epochs = 500;
      c.validation_every = 10;
      c.validation_metric = ValidationMetric::kFilteredMeanRank;
      c.validation_sample = 0;
      break;
    case Dataset::kSvo:
      c.negative_source = NegativeSource::kCorrupt;
      c.corruption = CorruptionStrategy::kLabelOnly;
      c.negatives_per_positive = 1;
      c.batch_size = 10000;
      c.epochs = 500;
      c.validation_every = 10;
      c.validation_metric = ValidationMetric::kLabelMeanRank;
      c.validation_sample = 1000;
      break;
  }
  return c;
}

struct PresetRow {
  const char* name;
  Dataset dataset;
  ModelKind kind;
  RegularizationScheme scheme;
  std::size_t d1, d2;
  double lambda, gamma, c1, c2, rho_l, alpha;
  const char* pretrain_bigram;
  const char* pretrain_trigram;
};

constexpr auto kSoft = RegularizationScheme::kSoft;
constexpr auto kHard = RegularizationScheme::kHard;
constexpr auto kBi = ModelKind::kBigram;
constexpr auto kTri = ModelKind::kTrigram;
constexpr auto kFt = ModelKind::kTatecFt;
constexpr auto kLc = ModelKind::kTatecLc;
constexpr auto kTe = ModelKind::kTransE;

// Values of the reference configurations; d1 doubles as TransE's d.
// clang-format off
constexpr PresetRow kPresets[] = {
  // UMLS
  {"umls-transe-soft",   Dataset::kUmls, kTe,  kSoft, 40,  0, 0.01,  0.5,  0,    0,    1,  1,  "", ""},
  {"umls-bigram-soft",   Dataset::kUmls, kBi,  kSoft, 40,  0, 0.01,  0.5,  0.1,  0,    1,  1,  "", ""},
  {"umls-trigram-soft",  Dataset::kUmls, kTri, kSoft, 0,  40, 0.01,  1,    0,    0.1,  5,  1,  "", ""},
  {"umls-tatec-ft-soft", Dataset::kUmls, kFt,  kSoft, 40, 40, 0.001, 1,    0.01, 0.01, 5,  1,  "umls-bigram-soft", "umls-trigram-soft"},
  {"umls-transe-hard",   Dataset::kUmls, kTe,  kHard, 40,  0, 0.01,  0.1,  0,    0,    1,  1,  "", ""},
  {"umls-bigram-hard",   Dataset::kUmls, kBi,  kHard, 40,  0, 0.01,  0.5,  0,    0,    1,  1,  "", ""},
  {"umls-trigram-hard",  Dataset::kUmls, kTri, kHard, 0,  40, 0.01,  1,    0,    0,    10, 1,  "", ""},
  {"umls-tatec-ft-hard", Dataset::kUmls, kFt,  kHard, 40, 40, 0.001, 1,    0,    0,    10, 1,  "umls-bigram-hard", "umls-trigram-hard"},
  {"umls-tatec-lc",      Dataset::kUmls, kLc,  kSoft, 40, 40, 0.01,  0.5,  0,    0,    5,  50, "umls-bigram-soft", "umls-trigram-soft"},
  // Kinships
  {"kinships-transe-soft",   Dataset::kKinships, kTe,  kSoft, 40,  0, 0.01,  1,   0,   0,      1,  1,  "", ""},
  {"kinships-bigram-soft",   Dataset::kKinships, kBi,  kSoft, 40,  0, 0.01,  1,   1,   0,      1,  1,  "", ""},
  {"kinships-trigram-soft",  Dataset::kKinships, kTri, kSoft, 0,  40, 0.01,  0.5, 0,   0.1,    5,  1,  "", ""},
  {"kinships-tatec-ft-soft", Dataset::kKinships, kFt,  kSoft, 40, 40, 0.001, 1,   100, 0.0001, 10, 1,  "kinships-bigram-soft", "kinships-trigram-soft"},
  {"kinships-transe-hard",   Dataset::kKinships, kTe,  kHard, 40,  0, 0.01,  1,   0,   0,      1,  1,  "", ""},
  {"kinships-bigram-hard",   Dataset::kKinships, kBi,  kHard, 40,  0, 0.01,  1,   0,   0,      1,  1,  "", ""},
  {"kinships-trigram-hard",  Dataset::kKinships, kTri, kHard, 0,  40, 0.01,  0.5, 0,   0,      10, 1,  "", ""},
  {"kinships-tatec-ft-hard", Dataset::kKinships, kFt,  kHard, 40, 40, 0.001, 1,   0,   0,      10, 1,  "kinships-bigram-hard", "kinships-trigram-hard"},
  {"kinships-tatec-lc",      Dataset::kKinships, kLc,  kSoft, 40, 40, 0.01,  1,   0,   0,      5,  10, "kinships-bigram-soft", "kinships-trigram-soft"},
  // FB15k
  {"fb15k-transe-soft",           Dataset::kFb15k, kTe,  kSoft, 100, 0,  0.01,  0.25, 0.1,   0,     1, 1,   "", ""},
  {"fb15k-bigram-soft",           Dataset::kFb15k, kBi,  kSoft, 100, 0,  0.01,  1,    0,     0,     1, 1,   "", ""},
  {"fb15k-trigram-soft",          Dataset::kFb15k, kTri, kSoft, 0,   50, 0.01,  0.25, 0,     0.001, 1, 1,   "", ""},
  {"fb15k-tatec-ft-soft",         Dataset::kFb15k, kFt,  kSoft, 100, 50, 0.001, 0.5,  0,     0,     1, 1,   "fb15k-bigram-soft", "fb15k-trigram-soft"},
  {"fb15k-transe-hard",           Dataset::kFb15k, kTe,  kHard, 100, 0,  0.01,  0.25, 0,     0,     1, 1,   "", ""},
  {"fb15k-bigram-hard",           Dataset::kFb15k, kBi,  kHard, 100, 0,  0.01,  0.25, 0,     0,     1, 1,   "", ""},
  {"fb15k-trigram-hard",          Dataset::kFb15k, kTri, kHard, 0,   50, 0.01,  0.25, 0,     0,     5, 1,   "", ""},
  {"fb15k-tatec-ft-hard",         Dataset::kFb15k, kFt,  kHard, 100, 50, 0.001, 0.25, 0,     0,     5, 1,   "fb15k-bigram-hard", "fb15k-trigram-hard"},
  {"fb15k-tatec-ft-no-pretrain",  Dataset::kFb15k, ModelKind::kTatecFtNoPretrain, kSoft, 100, 50, 0.01, 0.25, 0, 0.001, 1, 1, "", ""},
  {"fb15k-tatec-ft-shared",       Dataset::kFb15k, ModelKind::kTatecFtShared, kSoft, 75, 75, 0.01, 0.25, 0.001, 0.001, 5, 1, "", ""},
  {"fb15k-tatec-lc",              Dataset::kFb15k, kLc,  kSoft, 100, 50, 0.01,  0.25, 0,     0,     1, 200, "fb15k-bigram-soft", "fb15k-trigram-soft"},
  // SVO
  {"svo-transe-soft",   Dataset::kSvo, kTe,  kSoft, 50,  0, 0.01,   0.5, 1,   0,  1,  1,  "", ""},
  {"svo-bigram-soft",   Dataset::kSvo, kBi,  kSoft, 50,  0, 0.01,   1,   0.1, 0,  1,  1,  "", ""},
  {"svo-trigram-soft",  Dataset::kSvo, kTri, kSoft, 0,  50, 0.01,   1,   0,   10, 20, 1,  "", ""},
  {"svo-tatec-ft-soft", Dataset::kSvo, kFt,  kSoft, 50, 50, 0.0001, 1,   0.1, 1,  20, 1,  "svo-bigram-soft", "svo-trigram-soft"},
  {"svo-transe-hard",   Dataset::kSvo, kTe,  kHard, 50,  0, 0.01,   0.5, 0,   0,  1,  1,  "", ""},
  {"svo-bigram-hard",   Dataset::kSvo, kBi,  kHard, 50,  0, 0.01,   1,   0,   0,  1,  1,  "", ""},
  {"svo-trigram-hard",  Dataset::kSvo, kTri, kHard, 0,  50, 0.01,   1,   0,   0,  20, 1,  "", ""},
  {"svo-tatec-ft-hard", Dataset::kSvo, kFt,  kHard, 50, 50, 0.0001, 1,   0,   0,  20, 1,  "svo-bigram-hard", "svo-trigram-hard"},
  {"svo-tatec-lc",      Dataset::kSvo, kLc,  kSoft, 50, 50, 0.01,   1,   0,   0,  20, 50, "svo-bigram-soft", "svo-trigram-soft"},
};
// clang-format on

TrainConfig from_row(const PresetRow& row) {
  TrainConfig c = dataset_defaults(row.dataset);
  c.model_kind = row.kind;
  // Unused dimensions keep a harmless default so the config stays valid.
  c.d1 = row.d1 > 0 ? row.d1 : 1;
  c.d2 = row.d2 > 0 ? row.d2 : 1;
  c.lambda1 = row.lambda;
  c.lambda2 = row.lambda;
  c.gamma = row.gamma;
  c.regularization.scheme = row.scheme;
  c.regularization.c1 = row.c1;
  c.regularization.c2 = row.c2;
  c.regularization.rho_l = row.rho_l;
  c.alpha = row.alpha;
  c.pretrain_bigram = row.pretrain_bigram;
  c.pretrain_trigram = row.pretrain_trigram;
  // Combined SVO models are fine-tuned for 10 epochs, validated after each.
  if (row.dataset == Dataset::kSvo &&
      (row.kind == kFt || row.kind == ModelKind::kTatecFtNoPretrain ||
       row.kind == ModelKind::kTatecFtShared)) {
    c.epochs = 10;
    c.validation_every = 1;
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

void set_config_value(TrainConfig& c, std::string_view key,
                      std::string_view value) {
  const std::string k(key);
  if (k == "preset") {
    c = preset(value);
  } else if (k == "model") {
    c.model_kind = parse_model_kind(value);
  } else if (k == "d1") {
    c.d1 = to_int<std::size_t>(key, value);
  } else if (k == "d2") {
    c.d2 = to_int<std::size_t>(key, value);
  } else if (k == "lambda1") {
    c.lambda1 = to_double(key, value);
  } else if (k == "lambda2") {
    c.lambda2 = to_double(key, value);
  } else if (k == "gamma") {
    c.gamma = to_double(key, value);
  } else if (k == "batch_size") {
    c.batch_size = to_int<std::size_t>(key, value);
  } else if (k == "epochs") {
    c.epochs = to_int<int>(key, value);
  } else if (k == "negatives_per_positive") {
    c.negatives_per_positive = to_int<int>(key, value);
  } else if (k == "corruption") {
    c.corruption = parse_corruption(value);
  } else if (k == "negatives") {
    if (value == "observed")
      c.negative_source = NegativeSource::kObserved;
    else if (value == "corrupt")
      c.negative_source = NegativeSource::kCorrupt;
    else
      throw ConfigError("bad value '" + std::string(value) +
                        "' for key 'negatives' (observed|corrupt)");
  } else if (k == "regularization") {
    if (value == "hard")
      c.regularization.scheme = RegularizationScheme::kHard;
    else if (value == "soft")
      c.regularization.scheme = RegularizationScheme::kSoft;
    else
      throw ConfigError("bad value '" + std::string(value) +
                        "' for key 'regularization' (hard|soft)");
  } else if (k == "rho_e") {
    c.regularization.rho_e = to_double(key, value);
  } else if (k == "rho_l") {
    c.regularization.rho_l = to_double(key, value);
  } else if (k == "c1") {
    c.regularization.c1 = to_double(key, value);
  } else if (k == "c2") {
    c.regularization.c2 = to_double(key, value);
  } else if (k == "validation_every") {
    c.validation_every = to_int<int>(key, value);
  } else if (k == "validation_metric") {
    c.validation_metric = parse_validation_metric(value);
  } else if (k == "validation_sample") {
    c.validation_sample = value == "all" ? 0 : to_int<std::size_t>(key, value);
  } else if (k == "seed") {
    c.seed = to_int<std::uint64_t>(key, value);
  } else if (k == "threads") {
    c.threads = to_int<std::size_t>(key, value);
  } else if (k == "alpha") {
    c.alpha = to_double(key, value);
  } else if (k == "epsilon") {
    c.epsilon = to_double(key, value);
  } else if (k == "pretrain_bigram") {
    c.pretrain_bigram = value;
  } else if (k == "pretrain_trigram") {
    c.pretrain_trigram = value;
  } else {
    throw ConfigError("unknown config key '" + k + "'");
  }
}

TrainConfig parse_config(std::istream& in) {
  TrainConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    set_config_value(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return cfg;
}

TrainConfig parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

std::string to_config_text(const TrainConfig& c) {
  std::ostringstream out;
  const auto& r = c.regularization;
  out << "model = " << to_string(c.model_kind) << '\n'
      << "d1 = " << c.d1 << '\n'
      << "d2 = " << c.d2 << '\n'
      << "lambda1 = " << fmt(c.lambda1) << '\n'
      << "lambda2 = " << fmt(c.lambda2) << '\n'
      << "gamma = " << fmt(c.gamma) << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "epochs = " << c.epochs << '\n'
      << "negatives_per_positive = " << c.negatives_per_positive << '\n'
      << "corruption = " << to_string(c.corruption) << '\n'
      << "negatives = "
      << (c.negative_source == NegativeSource::kObserved ? "observed"
                                                          : "corrupt")
      << '\n'
      << "regularization = "
      << (r.scheme == RegularizationScheme::kHard ? "hard" : "soft") << '\n'
      << "rho_e = " << fmt(r.rho_e) << '\n'
      << "rho_l = " << fmt(r.rho_l) << '\n'
      << "c1 = " << fmt(r.c1) << '\n'
      << "c2 = " << fmt(r.c2) << '\n'
      << "validation_every = " << c.validation_every << '\n'
      << "validation_metric = " << to_string(c.validation_metric) << '\n'
      << "validation_sample = " << c.validation_sample << '\n'
      << "seed = " << c.seed << '\n'
      << "threads = " << c.threads << '\n'
      << "alpha = " << fmt(c.alpha) << '\n'
      << "epsilon = " << fmt(c.epsilon) << '\n';
  if (!c.pretrain_bigram.empty())
    out << "pretrain_bigram = " << c.pretrain_bigram << '\n';
  if (!c.pretrain_trigram.empty())
    out << "pretrain_trigram = " << c.pretrain_trigram << '\n';
  return out.str();
}

TrainConfig preset(std::string_view name) {
  for (const auto& row : kPresets)
    if (name == row.name) return from_row(row);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& row : kPresets) out.emplace_back(row.name);
  return out;
}

bool is_preset(std::string_view name) {
  for (const auto& row : kPresets)
    if (name == row.name) return true;
  return false;
}

}  // namespace tatec
