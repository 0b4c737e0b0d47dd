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

#include <sstream>

#include "tatec/config.hpp"
#include "tatec/errors.hpp"

namespace tatec {
namespace {

// Reference hyperparameters, written out independently of the preset table.
// d is d1 for TransE and bigram models, d2 for trigram models.
struct Expected {
  const char* name;
  std::size_t d1, d2;
  double lambda, gamma, c1, c2, rho_l;
};

// clang-format off
const Expected kTable[] = {
  {"umls-transe-soft",       40,  0, 0.01,   0.5,  0,     0,      0},
  {"umls-bigram-soft",       40,  0, 0.01,   0.5,  0.1,   0,      0},
  {"umls-trigram-soft",       0, 40, 0.01,   1,    0,     0.1,    5},
  {"umls-tatec-ft-soft",     40, 40, 0.001,  1,    0.01,  0.01,   5},
  {"umls-transe-hard",       40,  0, 0.01,   0.1,  0,     0,      0},
  {"umls-bigram-hard",       40,  0, 0.01,   0.5,  0,     0,      0},
  {"umls-trigram-hard",       0, 40, 0.01,   1,    0,     0,      10},
  {"umls-tatec-ft-hard",     40, 40, 0.001,  1,    0,     0,      10},
  {"kinships-transe-soft",   40,  0, 0.01,   1,    0,     0,      0},
  {"kinships-bigram-soft",   40,  0, 0.01,   1,    1,     0,      0},
  {"kinships-trigram-soft",   0, 40, 0.01,   0.5,  0,     0.1,    5},
  {"kinships-tatec-ft-soft", 40, 40, 0.001,  1,    100,   0.0001, 10},
  {"kinships-transe-hard",   40,  0, 0.01,   1,    0,     0,      0},
  {"kinships-bigram-hard",   40,  0, 0.01,   1,    0,     0,      0},
  {"kinships-trigram-hard",   0, 40, 0.01,   0.5,  0,     0,      10},
  {"kinships-tatec-ft-hard", 40, 40, 0.001,  1,    0,     0,      10},
  {"fb15k-transe-soft",     100,  0, 0.01,   0.25, 0.1,   0,      0},
  {"fb15k-bigram-soft",     100,  0, 0.01,   1,    0,     0,      0},
  {"fb15k-trigram-soft",      0, 50, 0.01,   0.25, 0,     0.001,  1},
  {"fb15k-tatec-ft-soft",   100, 50, 0.001,  0.5,  0,     0,      0},
  {"fb15k-transe-hard",     100,  0, 0.01,   0.25, 0,     0,      0},
  {"fb15k-bigram-hard",     100,  0, 0.01,   0.25, 0,     0,      0},
  {"fb15k-trigram-hard",      0, 50, 0.01,   0.25, 0,     0,      5},
  {"fb15k-tatec-ft-hard",   100, 50, 0.001,  0.25, 0,     0,      5},
  {"fb15k-tatec-ft-no-pretrain", 100, 50, 0.01, 0.25, 0,  0.001,  1},
  {"fb15k-tatec-ft-shared",  75, 75, 0.01,   0.25, 0.001, 0.001,  5},
  {"svo-transe-soft",        50,  0, 0.01,   0.5,  1,     0,      0},
  {"svo-bigram-soft",        50,  0, 0.01,   1,    0.1,   0,      0},
  {"svo-trigram-soft",        0, 50, 0.01,   1,    0,     10,     20},
  {"svo-tatec-ft-soft",      50, 50, 0.0001, 1,    0.1,   1,      20},
  {"svo-transe-hard",        50,  0, 0.01,   0.5,  0,     0,      0},
  {"svo-bigram-hard",        50,  0, 0.01,   1,    0,     0,      0},
  {"svo-trigram-hard",        0, 50, 0.01,   1,    0,     0,      20},
  {"svo-tatec-ft-hard",      50, 50, 0.0001, 1,    0,     0,      20},
};
// clang-format on

TEST(Presets, MatchReferenceConfigurations) {
  for (const auto& e : kTable) {
    SCOPED_TRACE(e.name);
    ASSERT_TRUE(is_preset(e.name));
    const auto c = preset(e.name);
    if (e.d1 > 0) EXPECT_EQ(c.d1, e.d1);
    if (e.d2 > 0) EXPECT_EQ(c.d2, e.d2);
    const bool bigram_side = e.d1 > 0;
    const bool trigram_side = e.d2 > 0;
    if (bigram_side) EXPECT_EQ(c.lambda1, e.lambda);
    if (trigram_side) EXPECT_EQ(c.lambda2, e.lambda);
    EXPECT_EQ(c.gamma, e.gamma);
    const bool hard = std::string(e.name).ends_with("-hard");
    EXPECT_EQ(c.regularization.scheme,
              hard ? RegularizationScheme::kHard : RegularizationScheme::kSoft);
    if (!hard) {
      EXPECT_EQ(c.regularization.c1, e.c1);
      EXPECT_EQ(c.regularization.c2, e.c2);
    }
    if (e.rho_l > 0) EXPECT_EQ(c.regularization.rho_l, e.rho_l);
    EXPECT_EQ(c.regularization.rho_e, 1.0);
    EXPECT_NO_THROW(c.validate());
  }
}

TEST(Presets, LinearCombinationMarginsAndAlphas) {
  struct Lc {
    const char* name;
    double gamma, alpha;
  };
  for (const auto& e : {Lc{"umls-tatec-lc", 0.5, 50}, Lc{"kinships-tatec-lc", 1, 10},
                        Lc{"fb15k-tatec-lc", 0.25, 200}, Lc{"svo-tatec-lc", 1, 50}}) {
    const auto c = preset(e.name);
    EXPECT_EQ(c.model_kind, ModelKind::kTatecLc) << e.name;
    EXPECT_EQ(c.gamma, e.gamma) << e.name;
    EXPECT_EQ(c.alpha, e.alpha) << e.name;
    EXPECT_FALSE(c.pretrain_bigram.empty());
    EXPECT_FALSE(c.pretrain_trigram.empty());
  }
}

TEST(Presets, DatasetProtocols) {
  const auto umls = preset("umls-trigram-soft");
  EXPECT_EQ(umls.epochs, 100);
  EXPECT_EQ(umls.validation_every, 10);
  EXPECT_EQ(umls.validation_metric, ValidationMetric::kAucPr);
  EXPECT_EQ(umls.validation_sample, 1000u);
  EXPECT_EQ(umls.negatives_per_positive, 1);
  EXPECT_EQ(umls.negative_source, NegativeSource::kObserved);

  const auto fb = preset("fb15k-bigram-soft");
  EXPECT_EQ(fb.epochs, 500);
  EXPECT_EQ(fb.negatives_per_positive, 2);
  EXPECT_EQ(fb.corruption, CorruptionStrategy::kHeadOrTail);
  EXPECT_EQ(fb.validation_metric, ValidationMetric::kFilteredMeanRank);
  EXPECT_EQ(fb.validation_sample, 0u);

  const auto svo = preset("svo-trigram-soft");
  EXPECT_EQ(svo.corruption, CorruptionStrategy::kLabelOnly);
  EXPECT_EQ(svo.validation_sample, 1000u);
  const auto svo_ft = preset("svo-tatec-ft-soft");
  EXPECT_EQ(svo_ft.epochs, 10);
  EXPECT_EQ(svo_ft.validation_every, 1);
}

TEST(Presets, FineTuningPresetsNameTheirConstituents) {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    if (c.model_kind != ModelKind::kTatecFt && c.model_kind != ModelKind::kTatecLc)
      continue;
    EXPECT_EQ(preset(c.pretrain_bigram).model_kind, ModelKind::kBigram) << name;
    EXPECT_EQ(preset(c.pretrain_trigram).model_kind, ModelKind::kTrigram) << name;
  }
  EXPECT_THROW(preset("umls-rescal"), ConfigError);
}

TEST(ConfigText, RoundTripsEveryPreset) {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    const auto text = to_config_text(c);
    EXPECT_EQ(to_config_text(parse_config_text(text)), text) << name;
  }
}

TEST(ConfigText, PresetLineThenOverrides) {
  const auto c = parse_config_text(
      "# comment\n\npreset = umls-trigram-soft\n  gamma = 0.25 \nseed=42\n");
  EXPECT_EQ(c.gamma, 0.25);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.d2, 40u);
}

TEST(ConfigText, UnknownKeyIsNamed) {
  try {
    parse_config_text("gamma = 1\nlearning_rate = 0.1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
  }
}

TEST(ConfigText, BadValuesAreConfigErrors) {
  EXPECT_THROW(parse_config_text("gamma = fast\n"), ConfigError);
  EXPECT_THROW(parse_config_text("model = rescal\n"), ConfigError);
  EXPECT_THROW(parse_config_text("gamma 1\n"), ConfigError);
}

// Parsing is syntactic; range checks happen in validate().
TEST(ConfigText, OutOfRangeValuesFailValidation) {
  EXPECT_THROW(parse_config_text("epochs = -3\n").validate(), ConfigError);
  EXPECT_THROW(parse_config_text("lambda1 = 0\n").validate(), ConfigError);
  EXPECT_THROW(parse_config_text("gamma = -1\n").validate(), ConfigError);
  EXPECT_NO_THROW(parse_config_text("preset = umls-bigram-soft\n").validate());
}

}  // namespace
}  // namespace tatec
