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

#include "ddiadv/kgstore.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ddiadv/error.h"
#include "ddiadv/rng.h"

namespace ddiadv {
namespace {

namespace fs = std::filesystem;

void StripCarriageReturn(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Splits on tabs; returns false unless there are exactly three non-empty
// fields.
bool SplitFields(const std::string& line, std::string fields[3]) {
  size_t start = 0;
  for (int k = 0; k < 3; ++k) {
    const size_t tab = line.find('\t', start);
    if (k < 2) {
      if (tab == std::string::npos) return false;
      fields[k] = line.substr(start, tab - start);
      start = tab + 1;
    } else {
      if (tab != std::string::npos) return false;
      fields[k] = line.substr(start);
    }
    if (fields[k].empty()) return false;
  }
  return true;
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

fs::path ResolveRelative(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

const char* SideName(Side side) {
  return side == Side::kHead ? "head" : "tail";
}

EntityId Vocab::AddEntity(const std::string& name) {
  auto [it, inserted] = entity_ids_.try_emplace(
      name, static_cast<EntityId>(entity_names_.size()));
  if (inserted) entity_names_.push_back(name);
  return it->second;
}

RelationId Vocab::AddRelation(const std::string& name) {
  auto [it, inserted] = relation_ids_.try_emplace(
      name, static_cast<RelationId>(relation_names_.size()));
  if (inserted) relation_names_.push_back(name);
  return it->second;
}

std::optional<EntityId> Vocab::FindEntity(const std::string& name) const {
  auto it = entity_ids_.find(name);
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Vocab::FindRelation(const std::string& name) const {
  auto it = relation_ids_.find(name);
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::EntityName(EntityId id) const {
  if (id >= entity_names_.size()) {
    throw LookupError("entity id " + std::to_string(id) + " out of range");
  }
  return entity_names_[id];
}

const std::string& Vocab::RelationName(RelationId id) const {
  if (id >= relation_names_.size()) {
    throw LookupError("relation id " + std::to_string(id) + " out of range");
  }
  return relation_names_[id];
}

Dataset ParseTsv(std::istream& in, bool has_header, const std::string& source) {
  Dataset ds;
  std::set<Triplet> seen;
  std::string line;
  std::string fields[3];
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (line_no == 1 && has_header) continue;
    if (line.empty()) continue;
    if (!SplitFields(line, fields)) {
      throw ParseError(source + ":" + std::to_string(line_no) +
                       ": expected head<TAB>relation<TAB>tail");
    }
    const Triplet t{ds.vocab.AddEntity(fields[0]),
                    ds.vocab.AddRelation(fields[1]),
                    ds.vocab.AddEntity(fields[2])};
    if (seen.insert(t).second) {
      ds.triplets.push_back(t);
    } else {
      ++ds.duplicates;
    }
  }
  if (ds.triplets.empty()) {
    throw DataError(source + ": empty dataset");
  }
  return ds;
}

Dataset LoadTsv(const std::string& path, bool has_header) {
  auto in = OpenForRead(path);
  return ParseTsv(in, has_header, path);
}

std::vector<Triplet> LoadTsvWithVocab(const std::string& path,
                                      const Vocab& vocab, bool has_header) {
  auto in = OpenForRead(path);
  std::vector<Triplet> out;
  std::string line;
  std::string fields[3];
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (line_no == 1 && has_header) continue;
    if (line.empty()) continue;
    if (!SplitFields(line, fields)) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected head<TAB>relation<TAB>tail");
    }
    const auto h = vocab.FindEntity(fields[0]);
    const auto r = vocab.FindRelation(fields[1]);
    const auto t = vocab.FindEntity(fields[2]);
    if (!h || !r || !t) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": name not in vocabulary");
    }
    out.push_back({*h, *r, *t});
  }
  return out;
}

std::string FormatTsv(const Vocab& vocab, std::span<const Triplet> triplets) {
  std::string out;
  for (const Triplet& t : triplets) {
    out += vocab.EntityName(t.head);
    out += '\t';
    out += vocab.RelationName(t.relation);
    out += '\t';
    out += vocab.EntityName(t.tail);
    out += '\n';
  }
  return out;
}

void SaveTsv(const std::string& path, const Vocab& vocab,
             std::span<const Triplet> triplets) {
  WriteFileAtomic(path, FormatTsv(vocab, triplets));
}

void WriteVocab(const std::string& dir, const Vocab& vocab) {
  auto format = [](const std::vector<std::string>& names) {
    std::string out;
    for (size_t i = 0; i < names.size(); ++i) {
      out += std::to_string(i) + "\t" + names[i] + "\n";
    }
    return out;
  };
  WriteFileAtomic((fs::path(dir) / "entities.tsv").string(),
                  format(vocab.entity_names()));
  WriteFileAtomic((fs::path(dir) / "relations.tsv").string(),
                  format(vocab.relation_names()));
}

namespace {

std::vector<std::string> ReadIdNameFile(const std::string& path) {
  auto in = OpenForRead(path);
  std::vector<std::string> names;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || tab + 1 >= line.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected id<TAB>name");
    }
    if (line.substr(0, tab) != std::to_string(names.size())) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": ids must be dense and ascending");
    }
    names.push_back(line.substr(tab + 1));
  }
  return names;
}

}  // namespace

Vocab ReadVocabFiles(const std::string& entities_path,
                     const std::string& relations_path) {
  Vocab vocab;
  for (const auto& n : ReadIdNameFile(entities_path)) vocab.AddEntity(n);
  for (const auto& n : ReadIdNameFile(relations_path)) vocab.AddRelation(n);
  return vocab;
}

Vocab ReadVocab(const std::string& dir) {
  return ReadVocabFiles((fs::path(dir) / "entities.tsv").string(),
                        (fs::path(dir) / "relations.tsv").string());
}

DatasetSplit SplitDataset(std::span<const Triplet> triplets,
                          const SplitRatios& ratios, uint64_t seed,
                          bool group_by_pair) {
  if (!(ratios.train > 0 && ratios.valid > 0 && ratios.test > 0) ||
      std::fabs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw DomainError("split ratios must be positive and sum to 1");
  }
  const size_t n = triplets.size();
  if (n < 3) {
    throw DataError("split needs at least 3 triplets, got " +
                    std::to_string(n));
  }
  const size_t n_valid = static_cast<size_t>(std::floor(ratios.valid * n));
  const size_t n_test = static_cast<size_t>(std::floor(ratios.test * n));

  DatasetSplit split;
  split.seed = seed;
  Rng rng(seed);

  if (!group_by_pair) {
    std::vector<Triplet> shuffled(triplets.begin(), triplets.end());
    rng.Shuffle(std::span<Triplet>(shuffled));
    split.valid.assign(shuffled.begin(), shuffled.begin() + n_valid);
    split.test.assign(shuffled.begin() + n_valid,
                      shuffled.begin() + n_valid + n_test);
    split.train.assign(shuffled.begin() + n_valid + n_test, shuffled.end());
    return split;
  }

  // Groups keyed by unordered pair, kept in first-appearance order.
  std::map<std::pair<EntityId, EntityId>, size_t> group_of;
  std::vector<std::vector<Triplet>> groups;
  for (const Triplet& t : triplets) {
    const auto key = std::minmax(t.head, t.tail);
    auto [it, inserted] = group_of.try_emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(t);
  }
  std::vector<size_t> order(groups.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.Shuffle(std::span<size_t>(order));
  for (size_t g : order) {
    auto& bucket = split.valid.size() < n_valid  ? split.valid
                   : split.test.size() < n_test ? split.test
                                                : split.train;
    bucket.insert(bucket.end(), groups[g].begin(), groups[g].end());
  }
  return split;
}

FilterIndex::FilterIndex(const DatasetSplit& split) {
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    for (const Triplet& t : *part) Add(t);
  }
}

void FilterIndex::Add(const Triplet& t) {
  auto& tails = tails_[Key(t.head, t.relation)];
  auto it = std::lower_bound(tails.begin(), tails.end(), t.tail);
  if (it != tails.end() && *it == t.tail) return;
  tails.insert(it, t.tail);
  auto& heads = heads_[Key(t.relation, t.tail)];
  heads.insert(std::lower_bound(heads.begin(), heads.end(), t.head), t.head);
  ++size_;
}

bool FilterIndex::Contains(const Triplet& t) const {
  const auto tails = KnownTails(t.head, t.relation);
  return std::binary_search(tails.begin(), tails.end(), t.tail);
}

std::span<const EntityId> FilterIndex::KnownTails(EntityId head,
                                                  RelationId relation) const {
  auto it = tails_.find(Key(head, relation));
  if (it == tails_.end()) return {};
  return it->second;
}

std::span<const EntityId> FilterIndex::KnownHeads(RelationId relation,
                                                  EntityId tail) const {
  auto it = heads_.find(Key(relation, tail));
  if (it == heads_.end()) return {};
  return it->second;
}

std::span<const EntityId> FilterIndex::Known(const Triplet& t,
                                             Side side) const {
  return side == Side::kTail ? KnownTails(t.head, t.relation)
                             : KnownHeads(t.relation, t.tail);
}

namespace {

void ValidateSynthParams(const SynthParams& p) {
  if (p.num_entities < 2) throw DomainError("synth: need at least 2 entities");
  if (p.num_relations < 1) throw DomainError("synth: need at least 1 relation");
  if (p.num_clusters < 1 || p.num_clusters > p.num_entities) {
    throw DomainError("synth: clusters must be in [1, num_entities]");
  }
  if (!(p.density >= 0.0 && p.density <= 1.0)) {
    throw DomainError("synth: density must be in [0, 1]");
  }
  if (!(p.noise_rate >= 0.0 && p.noise_rate <= 1.0)) {
    throw DomainError("synth: noise_rate must be in [0, 1]");
  }
}

}  // namespace

std::vector<size_t> SynthClusters(const SynthParams& params) {
  ValidateSynthParams(params);
  Rng rng(params.seed);
  std::vector<size_t> perm(params.num_entities);
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.Shuffle(std::span<size_t>(perm));
  std::vector<size_t> cluster(params.num_entities);
  for (size_t pos = 0; pos < perm.size(); ++pos) {
    cluster[perm[pos]] = pos % params.num_clusters;
  }
  return cluster;
}

Dataset SynthKg(const SynthParams& params) {
  const std::vector<size_t> cluster = SynthClusters(params);
  // Stream independent of the cluster assignment draw.
  Rng rng(params.seed ^ 0x5851f42d4c957f2dULL);

  Dataset ds;
  for (size_t i = 0; i < params.num_entities; ++i) {
    ds.vocab.AddEntity("e" + std::to_string(i));
  }
  for (size_t r = 0; r < params.num_relations; ++r) {
    ds.vocab.AddRelation("r" + std::to_string(r));
  }

  std::vector<std::vector<EntityId>> members(params.num_clusters);
  for (size_t i = 0; i < cluster.size(); ++i) {
    members[cluster[i]].push_back(static_cast<EntityId>(i));
  }

  std::set<Triplet> present;
  for (size_t r = 0; r < params.num_relations; ++r) {
    const size_t src = rng.UniformInt(params.num_clusters);
    const size_t dst = rng.UniformInt(params.num_clusters);
    for (EntityId h : members[src]) {
      for (EntityId t : members[dst]) {
        if (h == t) continue;
        if (rng.Uniform() < params.density) {
          const Triplet trip{h, static_cast<RelationId>(r), t};
          present.insert(trip);
          ds.triplets.push_back(trip);
        }
      }
    }
  }

  const size_t n_noise = static_cast<size_t>(
      std::llround(params.noise_rate * static_cast<double>(ds.triplets.size())));
  const size_t capacity =
      params.num_entities * (params.num_entities - 1) * params.num_relations;
  size_t added = 0;
  while (added < n_noise && present.size() < capacity) {
    const auto h = static_cast<EntityId>(rng.UniformInt(params.num_entities));
    const auto t = static_cast<EntityId>(rng.UniformInt(params.num_entities));
    const auto r = static_cast<RelationId>(rng.UniformInt(params.num_relations));
    if (h == t) continue;
    const Triplet trip{h, r, t};
    if (!present.insert(trip).second) continue;
    ds.triplets.push_back(trip);
    ++added;
  }
  return ds;
}

void WriteSplitManifest(const std::string& path, const SplitManifest& m) {
  std::ostringstream out;
  out << "entities=" << m.entities << "\n"
      << "relations=" << m.relations << "\n"
      << "train=" << m.train << "\n"
      << "valid=" << m.valid << "\n"
      << "test=" << m.test << "\n"
      << "seed=" << m.seed << "\n";
  WriteFileAtomic(path, out.str());
}

SplitManifest ReadSplitManifest(const std::string& path) {
  auto in = OpenForRead(path);
  const fs::path base = fs::path(path).parent_path();
  SplitManifest m;
  std::string line;
  size_t line_no = 0;
  bool has_seed = false;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "seed") {
      m.seed = std::stoull(value);
      has_seed = true;
    } else if (key == "entities") {
      m.entities = ResolveRelative(base, value).string();
    } else if (key == "relations") {
      m.relations = ResolveRelative(base, value).string();
    } else if (key == "train") {
      m.train = ResolveRelative(base, value).string();
    } else if (key == "valid") {
      m.valid = ResolveRelative(base, value).string();
    } else if (key == "test") {
      m.test = ResolveRelative(base, value).string();
    } else {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": unknown manifest key '" + key + "'");
    }
  }
  if (m.train.empty() || m.valid.empty() || m.test.empty() ||
      m.entities.empty() || m.relations.empty() || !has_seed) {
    throw ParseError(path + ": incomplete split manifest");
  }
  return m;
}

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string ReadFile(const std::string& path) {
  auto in = OpenForRead(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ddiadv
