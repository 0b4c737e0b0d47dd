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

#include "tatec/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "tatec/config.hpp"
#include "tatec/errors.hpp"

namespace tatec {

namespace {

constexpr Block kBlocks[] = {
    Block::kBigramEntity,  Block::kHeadRelation,   Block::kTailRelation,
    Block::kDiagonal,      Block::kTrigramEntity,  Block::kRelationMatrix,
    Block::kTransEEntity,  Block::kTransERelation,
};

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << "0x" << std::hex << v;
  return s.str();
}

void write_doubles(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      char bytes[8];
      for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(bits >> (8 * i));
      out.write(bytes, 8);
    }
  }
}

void read_doubles(std::istream& in, std::span<double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size())
    throw DataError("checkpoint truncated");
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(bytes[k * 8 + static_cast<std::size_t>(i)])
              << (8 * i);
    values[k] = std::bit_cast<double>(bits);
  }
}

struct BlockSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct Header {
  std::map<std::string, std::string> fields;
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  std::vector<std::string> config_lines;
  std::vector<BlockSpec> blocks;
};

Header read_header(std::istream& in) {
  Header h;
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic)
    throw DataError("not a checkpoint (bad magic)");
  while (true) {
    if (!std::getline(in, line)) throw DataError("checkpoint header truncated");
    if (line.empty()) break;
    const auto colon = line.find(": ");
    if (colon == std::string::npos)
      throw DataError("malformed checkpoint header line '" + line + "'");
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "entity") {
      h.entities.push_back(value);
    } else if (key == "relation") {
      h.relations.push_back(value);
    } else if (key == "config") {
      h.config_lines.push_back(value);
    } else if (key == "block") {
      std::istringstream s(value);
      BlockSpec b;
      if (!(s >> b.name >> b.rows >> b.cols))
        throw DataError("malformed block line '" + line + "'");
      h.blocks.push_back(b);
    } else {
      h.fields[key] = value;
    }
  }
  return h;
}

const std::string& field(const Header& h, const std::string& key) {
  auto it = h.fields.find(key);
  if (it == h.fields.end())
    throw DataError("checkpoint header lacks '" + key + "'");
  return it->second;
}

std::size_t to_size(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw DataError("bad " + what + " '" + s + "' in checkpoint header");
  }
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& c) {
  const Model& m = c.model;
  if (c.vocab.num_entities() != m.num_entities() ||
      c.vocab.num_relations() != m.num_relations())
    throw DomainError("checkpoint vocabulary does not match the model");
  out << kCheckpointMagic << '\n'
      << "version: " << kCheckpointVersion << '\n'
      << "kind: " << to_string(m.kind()) << '\n'
      << "entities: " << m.num_entities() << '\n'
      << "relations: " << m.num_relations() << '\n'
      << "d1: " << m.d1() << '\n'
      << "d2: " << m.d2() << '\n'
      << "entity_hash: " << hex(c.vocab.entity_hash()) << '\n'
      << "relation_hash: " << hex(c.vocab.relation_hash()) << '\n'
      << "seed: " << c.seed << '\n';
  if (c.config) {
    std::istringstream lines(to_config_text(*c.config));
    std::string line;
    while (std::getline(lines, line)) out << "config: " << line << '\n';
  }
  for (const auto& e : c.vocab.entities()) out << "entity: " << e << '\n';
  for (const auto& r : c.vocab.relations()) out << "relation: " << r << '\n';

  std::vector<std::pair<std::string, std::span<const double>>> blocks;
  std::vector<std::size_t> shapes;
  for (auto b : kBlocks) {
    if (!m.has_block(b)) continue;
    const auto& mat = m.block(b);
    out << "block: " << to_string(b) << ' ' << mat.rows() << ' ' << mat.cols()
        << '\n';
    blocks.emplace_back(std::string(to_string(b)), mat.data());
  }
  std::vector<double> scalars;
  if (m.has_weights()) {
    const auto& w = m.weights();
    scalars = {w.alpha, w.epsilon};
    out << "block: lc_delta " << w.delta.rows() << ' ' << w.delta.cols() << '\n'
        << "block: lc_sigma 1 " << w.sigma.size() << '\n'
        << "block: lc_scalars 1 2\n";
    blocks.emplace_back("lc_delta", w.delta.data());
    blocks.emplace_back("lc_sigma", w.sigma);
    blocks.emplace_back("lc_scalars", scalars);
  }
  out << '\n';
  for (const auto& [name, data] : blocks) write_doubles(out, data);
  if (!out) throw DataError("failed to write checkpoint");
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  save_checkpoint(out, c);
}

Checkpoint load_checkpoint(std::istream& in) {
  const Header h = read_header(in);
  if (field(h, "version") != std::to_string(kCheckpointVersion))
    throw DataError("unsupported checkpoint version " + field(h, "version"));
  ModelKind kind;
  try {
    kind = parse_model_kind(field(h, "kind"));
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  const auto e = to_size(field(h, "entities"), "entity count");
  const auto l = to_size(field(h, "relations"), "relation count");
  const auto d1 = to_size(field(h, "d1"), "d1");
  const auto d2 = to_size(field(h, "d2"), "d2");
  if (h.entities.size() != e || h.relations.size() != l)
    throw DataError("checkpoint vocabulary size does not match its header");

  Checkpoint c;
  c.seed = to_size(field(h, "seed"), "seed");
  c.vocab = Vocab(h.entities, h.relations);
  if (hex(c.vocab.entity_hash()) != field(h, "entity_hash") ||
      hex(c.vocab.relation_hash()) != field(h, "relation_hash"))
    throw DataError("checkpoint vocabulary hash mismatch");
  if (!h.config_lines.empty()) {
    std::string text;
    for (const auto& line : h.config_lines) text += line + '\n';
    c.config = parse_config_text(text);
  }
  c.model = Model::zeros(kind, static_cast<std::int32_t>(e),
                         static_cast<std::int32_t>(l), d1, d2);
  Model& m = c.model;

  std::size_t expected = 0;
  for (auto b : kBlocks) expected += m.has_block(b);
  if (m.has_weights()) expected += 3;
  if (h.blocks.size() != expected)
    throw DataError("checkpoint has " + std::to_string(h.blocks.size()) +
                    " blocks, a " + field(h, "kind") + " model needs " +
                    std::to_string(expected));

  auto expect = [](const BlockSpec& spec, std::string_view name,
                   std::size_t rows, std::size_t cols) {
    if (spec.name != name || spec.rows != rows || spec.cols != cols)
      throw DataError("checkpoint block '" + spec.name + "' (" +
                      std::to_string(spec.rows) + " x " +
                      std::to_string(spec.cols) + ") does not match expected '" +
                      std::string(name) + "' (" + std::to_string(rows) + " x " +
                      std::to_string(cols) + ")");
  };
  std::size_t next = 0;
  for (auto b : kBlocks) {
    if (!m.has_block(b)) continue;
    auto& mat = m.block(b);
    expect(h.blocks[next++], to_string(b), mat.rows(), mat.cols());
    read_doubles(in, mat.data());
  }
  if (m.has_weights()) {
    auto& w = m.weights();
    expect(h.blocks[next++], "lc_delta", w.delta.rows(), w.delta.cols());
    read_doubles(in, w.delta.data());
    expect(h.blocks[next++], "lc_sigma", 1, w.sigma.size());
    read_doubles(in, w.sigma);
    double scalars[2];
    expect(h.blocks[next++], "lc_scalars", 1, 2);
    read_doubles(in, scalars);
    w.alpha = scalars[0];
    w.epsilon = scalars[1];
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw DataError("trailing bytes after checkpoint blocks");
  return c;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

std::map<std::string, std::string> read_checkpoint_header(std::istream& in) {
  Header h = read_header(in);
  auto out = h.fields;
  out["vocab.entities"] = std::to_string(h.entities.size());
  out["vocab.relations"] = std::to_string(h.relations.size());
  for (const auto& b : h.blocks)
    out["block." + b.name] = std::to_string(b.rows) + " x " +
                             std::to_string(b.cols);
  for (const auto& line : h.config_lines) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos)
      out["config." + line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

void check_vocab_matches(const Checkpoint& ckpt, const Vocab& vocab) {
  if (ckpt.vocab.entity_hash() != vocab.entity_hash() ||
      ckpt.vocab.relation_hash() != vocab.relation_hash())
    throw DataError("dataset vocabulary does not match the checkpoint");
}

}  // namespace tatec
