/*
 * Copyright 2026 The ddiadv Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ddiadv/checkpoint.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

#include "ddiadv/error.h"

namespace ddiadv {
namespace {

constexpr char kMagic[8] = {'D', 'D', 'I', 'A', 'D', 'V', 'C', 'K'};

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& source)
      : bytes_(bytes), source_(source) {}

  uint64_t Get(int width) {
    if (pos_ + width > bytes_.size()) {
      throw DataError(source_ + ": truncated checkpoint");
    }
    uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += width;
    return v;
  }

  void Fill(std::span<double> values) {
    for (double& v : values) v = std::bit_cast<double>(Get(8));
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }
  size_t remaining() const { return bytes_.size() - pos_; }

  void Skip(size_t n) { pos_ += n; }

 private:
  const std::string& bytes_;
  const std::string& source_;
  size_t pos_ = 0;
};

}  // namespace

std::string EncodeCheckpoint(const EmbeddingModel& model) {
  std::string out(kMagic, sizeof(kMagic));
  PutU32(out, kCheckpointLayoutVersion);
  PutU32(out, static_cast<uint32_t>(model.tag()));
  PutU32(out, static_cast<uint32_t>(model.kind().norm));
  PutU32(out, 0);
  PutU64(out, model.num_entities());
  PutU64(out, model.num_relations());
  PutU64(out, model.dim());
  for (double v : model.entities().values()) PutU64(out, std::bit_cast<uint64_t>(v));
  for (double v : model.relations().values()) PutU64(out, std::bit_cast<uint64_t>(v));
  return out;
}

EmbeddingModel DecodeCheckpoint(const std::string& bytes,
                                const std::string& source) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw DataError(source + ": not a checkpoint (bad magic)");
  }
  Reader reader(bytes, source);
  reader.Skip(sizeof(kMagic));
  const auto version = static_cast<uint32_t>(reader.Get(4));
  if (version != kCheckpointLayoutVersion) {
    throw DataError(source + ": unsupported layout version " +
                    std::to_string(version));
  }
  const auto tag = static_cast<uint32_t>(reader.Get(4));
  const auto norm = static_cast<uint32_t>(reader.Get(4));
  reader.Get(4);
  if (tag > static_cast<uint32_t>(ScorerTag::kRotatE) || (norm != 1 && norm != 2)) {
    throw DataError(source + ": corrupt header");
  }
  const uint64_t n_ent = reader.Get(8);
  const uint64_t n_rel = reader.Get(8);
  const uint64_t dim = reader.Get(8);
  ScorerKind kind{static_cast<ScorerTag>(tag), static_cast<DistanceNorm>(norm),
                  dim};
  const uint64_t expected =
      8 * (n_ent * EntityWidth(kind.tag, dim) + n_rel * RelationWidth(kind.tag, dim));
  if (dim == 0 || reader.remaining() != expected) {
    throw DataError(source + ": payload size does not match header");
  }
  EmbeddingModel model(kind, n_ent, n_rel);
  reader.Fill(model.entities().values());
  reader.Fill(model.relations().values());
  return model;
}

void WriteCheckpoint(const std::string& path, const EmbeddingModel& model,
                     const CheckpointMeta& meta) {
  WriteFileAtomic(path, EncodeCheckpoint(model));
  std::ostringstream manifest;
  manifest << "scorer=" << ScorerName(model.tag()) << "\n"
           << "entities=" << model.num_entities() << "\n"
           << "relations=" << model.num_relations() << "\n"
           << "dim=" << model.dim() << "\n"
           << "layout_version=" << kCheckpointLayoutVersion << "\n"
           << "seed=" << meta.seed << "\n"
           << "config_hash=" << meta.config_hash << "\n";
  WriteFileAtomic(path + ".manifest", manifest.str());
}

EmbeddingModel ReadCheckpoint(const std::string& path) {
  return DecodeCheckpoint(ReadFile(path), path);
}

std::string HashHex(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* kDigits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kDigits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string EmbeddingCsv(const DenseMatrix& table,
                         const std::vector<std::string>& names) {
  if (names.size() != table.rows()) {
    throw ShapeError("embedding csv: " + std::to_string(names.size()) +
                     " names for " + std::to_string(table.rows()) + " rows");
  }
  std::string out = "name";
  for (size_t j = 0; j < table.cols(); ++j) out += ",d" + std::to_string(j);
  out += '\n';
  for (size_t i = 0; i < table.rows(); ++i) {
    out += names[i];
    for (double v : table.row(i)) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

DenseMatrix ParseEmbeddingCsv(const std::string& csv,
                              std::vector<std::string>* names) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("embedding csv: empty");
  size_t cols = 0;
  for (char c : line) cols += (c == ',');
  std::vector<double> data;
  size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t start = line.find(',');
    if (start == std::string::npos) {
      throw ParseError("embedding csv: row " + std::to_string(rows + 1) +
                       " has no values");
    }
    if (names) names->push_back(line.substr(0, start));
    size_t count = 0;
    while (start != std::string::npos) {
      const size_t next = line.find(',', start + 1);
      const size_t end = next == std::string::npos ? line.size() : next;
      double v = 0.0;
      auto res = std::from_chars(line.data() + start + 1, line.data() + end, v);
      if (res.ec != std::errc() || res.ptr != line.data() + end) {
        throw ParseError("embedding csv: bad number in row " +
                         std::to_string(rows + 1));
      }
      data.push_back(v);
      ++count;
      start = next;
    }
    if (count != cols) {
      throw ParseError("embedding csv: row " + std::to_string(rows + 1) +
                       " has " + std::to_string(count) + " values, expected " +
                       std::to_string(cols));
    }
    ++rows;
  }
  return DenseMatrix(rows, cols, std::move(data));
}

}  // namespace ddiadv
