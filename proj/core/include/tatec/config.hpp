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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tatec/training.hpp"

namespace tatec {

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// ignored; a `preset = <name>` line loads that preset before the remaining
/// keys are applied. Unknown keys throw ConfigError naming the key.
TrainConfig parse_config(std::istream& in);
TrainConfig parse_config_text(std::string_view text);

/// Applies one key; throws ConfigError for unknown keys or bad values.
void set_config_value(TrainConfig& cfg, std::string_view key,
                      std::string_view value);

/// Every key in a fixed order, round-trippable through parse_config.
std::string to_config_text(const TrainConfig& cfg);

/// Hyperparameter presets for UMLS, Kinships, FB15k and SVO, named like
/// `umls-trigram-soft` or `fb15k-tatec-ft-shared`.
TrainConfig preset(std::string_view name);
std::vector<std::string> preset_names();
bool is_preset(std::string_view name);

}  // namespace tatec
