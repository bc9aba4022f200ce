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

#ifndef DDIADV_KGSTORE_H_
#define DDIADV_KGSTORE_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ddiadv {

using EntityId = uint32_t;
using RelationId = uint32_t;

struct Triplet {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  bool operator==(const Triplet&) const = default;
  auto operator<=>(const Triplet&) const = default;
};

enum class Side { kHead, kTail };

const char* SideName(Side side);

// Dense ids in first-appearance order.
class Vocab {
 public:
  EntityId AddEntity(const std::string& name);
  RelationId AddRelation(const std::string& name);

  std::optional<EntityId> FindEntity(const std::string& name) const;
  std::optional<RelationId> FindRelation(const std::string& name) const;

  const std::string& EntityName(EntityId id) const;
  const std::string& RelationName(RelationId id) const;

  size_t num_entities() const { return entity_names_.size(); }
  size_t num_relations() const { return relation_names_.size(); }

  const std::vector<std::string>& entity_names() const {
    return entity_names_;
  }
  const std::vector<std::string>& relation_names() const {
    return relation_names_;
  }

  bool operator==(const Vocab& other) const {
    return entity_names_ == other.entity_names_ &&
           relation_names_ == other.relation_names_;
  }

 private:
  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::unordered_map<std::string, RelationId> relation_ids_;
};

struct Dataset {
  Vocab vocab;
  std::vector<Triplet> triplets;
  size_t duplicates = 0;
};

// head<TAB>relation<TAB>tail per line, LF or CRLF, blank lines ignored.
// Malformed lines raise ParseError with the 1-based line number; a file
// without triplets raises DataError("empty dataset").
Dataset ParseTsv(std::istream& in, bool has_header,
                 const std::string& source = "<stream>");
Dataset LoadTsv(const std::string& path, bool has_header);

// Reads a triplet file against a fixed vocabulary; unknown names are a
// DataError (vocabulary mismatch).
std::vector<Triplet> LoadTsvWithVocab(const std::string& path,
                                      const Vocab& vocab, bool has_header);

void SaveTsv(const std::string& path, const Vocab& vocab,
             std::span<const Triplet> triplets);
std::string FormatTsv(const Vocab& vocab, std::span<const Triplet> triplets);

// entities.tsv / relations.tsv as id<TAB>name.
void WriteVocab(const std::string& dir, const Vocab& vocab);
Vocab ReadVocab(const std::string& dir);
Vocab ReadVocabFiles(const std::string& entities_path,
                     const std::string& relations_path);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<Triplet> train;
  std::vector<Triplet> valid;
  std::vector<Triplet> test;
  uint64_t seed = 0;

  size_t total() const { return train.size() + valid.size() + test.size(); }
};

// Seeded shuffle then contiguous partition. valid and test receive
// floor(ratio * n); the remainder goes to train. With group_by_pair every
// triplet of an unordered entity pair lands in the same split.
DatasetSplit SplitDataset(std::span<const Triplet> triplets,
                          const SplitRatios& ratios, uint64_t seed,
                          bool group_by_pair = false);

// Known-true lookup over train, valid and test.
class FilterIndex {
 public:
  FilterIndex() = default;
  explicit FilterIndex(const DatasetSplit& split);

  void Add(const Triplet& t);
  bool Contains(const Triplet& t) const;

  // Sorted tails t with (head, relation, t) known.
  std::span<const EntityId> KnownTails(EntityId head,
                                       RelationId relation) const;
  // Sorted heads h with (h, relation, tail) known.
  std::span<const EntityId> KnownHeads(RelationId relation,
                                       EntityId tail) const;
  std::span<const EntityId> Known(const Triplet& t, Side side) const;

  size_t size() const { return size_; }

 private:
  static uint64_t Key(uint32_t a, uint32_t b) {
    return (static_cast<uint64_t>(a) << 32) | b;
  }

  std::unordered_map<uint64_t, std::vector<EntityId>> tails_;
  std::unordered_map<uint64_t, std::vector<EntityId>> heads_;
  size_t size_ = 0;
};

struct SynthParams {
  size_t num_entities = 50;
  size_t num_relations = 5;
  size_t num_clusters = 5;
  double density = 0.3;
  double noise_rate = 0.0;
  uint64_t seed = 0;
};

// Clustered synthetic KG. Each relation connects a sampled source cluster to
// a sampled target cluster; every compatible ordered pair is emitted with
// probability `density`, then round(noise_rate * emitted) uniformly random
// triplets are added.
Dataset SynthKg(const SynthParams& params);

// Cluster of each entity in SynthKg's assignment (exposed for tests).
std::vector<size_t> SynthClusters(const SynthParams& params);

// Paths of a split written to disk, plus its seed.
struct SplitManifest {
  std::string entities;
  std::string relations;
  std::string train;
  std::string valid;
  std::string test;
  uint64_t seed = 0;
};

void WriteSplitManifest(const std::string& path, const SplitManifest& m);
SplitManifest ReadSplitManifest(const std::string& path);

// Writes text through a temporary file and rename.
void WriteFileAtomic(const std::string& path, const std::string& contents);
std::string ReadFile(const std::string& path);

}  // namespace ddiadv

#endif  // DDIADV_KGSTORE_H_
