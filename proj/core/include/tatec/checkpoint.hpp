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
#include <map>
#include <optional>
#include <string>

#include "tatec/kbdata.hpp"
#include "tatec/scoring.hpp"
#include "tatec/training.hpp"

namespace tatec {

inline constexpr std::string_view kCheckpointMagic = "TATC1";
inline constexpr int kCheckpointVersion = 1;

/// Model parameters, the vocabulary they were trained on, and the resolved
/// training configuration.
///
/// On disk: a text header (magic line, `key: value` lines, one `entity:` /
/// `relation:` line per vocabulary entry, one `block: name rows cols` line per
/// parameter block) terminated by a blank line, then the blocks as
/// little-endian IEEE-754 doubles, row-major, in header order.
struct Checkpoint {
  Model model;
  Vocab vocab;
  std::optional<TrainConfig> config;
  std::uint64_t seed = 0;
};

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Throws DataError on malformed input or when header dimensions disagree
/// with the blocks.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::string& path);

/// Header fields only (no parameter data), for `inspect`.
std::map<std::string, std::string> read_checkpoint_header(std::istream& in);

/// Throws DataError if the vocabulary hashes differ.
void check_vocab_matches(const Checkpoint& ckpt, const Vocab& vocab);

}  // namespace tatec
