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
#include <unistd.h>

#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddiadv/error.h"
#include "ddiadv/rng.h"
#include "gtest/gtest.h"

namespace ddiadv {
namespace {

namespace fs = std::filesystem;

Dataset Parse(const std::string& text, bool header = false) {
  std::istringstream in(text);
  return ParseTsv(in, header, "mem.tsv");
}

fs::path TempDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() /
                 ("ddiadv_kgstore_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<Triplet> Sequential(size_t n) {
  std::vector<Triplet> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back({static_cast<EntityId>(i), static_cast<RelationId>(i % 3),
                   static_cast<EntityId>(i + 1)});
  }
  return out;
}

TEST(ParseTsvTest, ThreeDistinctLines) {
  const Dataset ds = Parse("a\tr1\tb\nb\tr2\tc\na\tr1\tc\n");
  EXPECT_EQ(ds.triplets.size(), 3u);
  EXPECT_EQ(ds.duplicates, 0u);
  EXPECT_EQ(ds.vocab.num_entities(), 3u);
  EXPECT_EQ(ds.vocab.num_relations(), 2u);
  EXPECT_EQ(ds.vocab.EntityName(0), "a");
  EXPECT_EQ(ds.vocab.EntityName(1), "b");
  EXPECT_EQ(ds.vocab.RelationName(1), "r2");
}

TEST(ParseTsvTest, DuplicateLineIsCounted) {
  const Dataset ds = Parse("a\tr\tb\na\tr\tb\n");
  EXPECT_EQ(ds.triplets.size(), 1u);
  EXPECT_EQ(ds.duplicates, 1u);
}

TEST(ParseTsvTest, TwoFieldsNamesTheLine) {
  try {
    Parse("a\tr\tb\n\nc\td\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("mem.tsv:3"), std::string::npos)
        << e.what();
  }
}

TEST(ParseTsvTest, EmptyInputIsDataError) {
  EXPECT_THROW(Parse(""), DataError);
  EXPECT_THROW(Parse("h\tr\tt\n", /*header=*/true), DataError);
}

TEST(ParseTsvTest, CrlfAndHeader) {
  const Dataset ds = Parse("head\trel\ttail\r\na\tr\tb\r\n", true);
  ASSERT_EQ(ds.triplets.size(), 1u);
  EXPECT_EQ(ds.vocab.EntityName(1), "b");
}

TEST(VocabTest, NameIdRoundTrip) {
  const Dataset ds = Parse("x\tp\ty\ny\tq\tz\nz\tp\tx\n");
  for (size_t i = 0; i < ds.vocab.num_entities(); ++i) {
    const auto id = ds.vocab.FindEntity(ds.vocab.EntityName(i));
    ASSERT_TRUE(id.has_value());
    EXPECT_EQ(*id, i);
  }
  EXPECT_FALSE(ds.vocab.FindEntity("nope").has_value());
  EXPECT_THROW(ds.vocab.EntityName(99), LookupError);
}

TEST(TsvFileTest, SaveLoadRoundTripIsByteIdentical) {
  const fs::path dir = TempDir("roundtrip");
  const std::string text = "a\tr1\tb\nb\tr2\tc\nc\tr1\ta\n";
  const Dataset ds = Parse(text);
  SaveTsv((dir / "x.tsv").string(), ds.vocab, ds.triplets);
  EXPECT_EQ(ReadFile((dir / "x.tsv").string()), text);
  const Dataset again = LoadTsv((dir / "x.tsv").string(), false);
  EXPECT_EQ(again.vocab, ds.vocab);
  EXPECT_EQ(again.triplets, ds.triplets);
  fs::remove_all(dir);
}

TEST(TsvFileTest, MissingFileIsIoErrorNamingPath) {
  try {
    LoadTsv("/nonexistent/dir/file.tsv", false);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/file.tsv"),
              std::string::npos);
  }
}

TEST(TsvFileTest, VocabFilesRoundTrip) {
  const fs::path dir = TempDir("vocab");
  const Dataset ds = Parse("a\tr1\tb\nb\tr2\tc\n");
  WriteVocab(dir.string(), ds.vocab);
  EXPECT_EQ(ReadFile((dir / "entities.tsv").string()), "0\ta\n1\tb\n2\tc\n");
  EXPECT_EQ(ReadVocab(dir.string()), ds.vocab);
  WriteFileAtomic((dir / "other.tsv").string(), "a\tr2\tz\n");
  EXPECT_THROW(LoadTsvWithVocab((dir / "other.tsv").string(), ds.vocab, false),
               DataError);
  fs::remove_all(dir);
}

TEST(SplitTest, TenTripletsGiveEightOneOne) {
  const DatasetSplit s = SplitDataset(Sequential(10), {}, 1);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.valid.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(SplitTest, DeepDdiScaleCounts) {
  const DatasetSplit s = SplitDataset(Sequential(192284), {}, 7);
  EXPECT_EQ(s.train.size(), 153828u);
  EXPECT_EQ(s.valid.size(), 19228u);
  EXPECT_EQ(s.test.size(), 19228u);
}

TEST(SplitTest, DeterministicDisjointAndComplete) {
  const auto all = Sequential(257);
  const DatasetSplit a = SplitDataset(all, {0.7, 0.2, 0.1}, 42);
  const DatasetSplit b = SplitDataset(all, {0.7, 0.2, 0.1}, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.valid, b.valid);
  EXPECT_EQ(a.test, b.test);
  std::multiset<Triplet> seen;
  for (const auto* part : {&a.train, &a.valid, &a.test}) {
    seen.insert(part->begin(), part->end());
  }
  EXPECT_EQ(seen, std::multiset<Triplet>(all.begin(), all.end()));
  EXPECT_NEAR(static_cast<double>(a.valid.size()), 0.2 * 257, 1.0);
  EXPECT_NEAR(static_cast<double>(a.test.size()), 0.1 * 257, 1.0);
  const DatasetSplit c = SplitDataset(all, {0.7, 0.2, 0.1}, 43);
  EXPECT_NE(a.train, c.train);
}

TEST(SplitTest, RejectsBadInput) {
  EXPECT_THROW(SplitDataset(Sequential(2), {}, 0), DataError);
  EXPECT_THROW(SplitDataset(Sequential(10), {0.5, 0.1, 0.1}, 0), DomainError);
  EXPECT_THROW(SplitDataset(Sequential(10), {0.9, 0.1, 0.0}, 0), DomainError);
}

TEST(SplitTest, GroupByPairKeepsPairsTogether) {
  std::vector<Triplet> all;
  for (EntityId a = 0; a < 12; ++a) {
    for (EntityId b = a + 1; b < 12; b += 3) {
      all.push_back({a, 0, b});
      all.push_back({b, 1, a});
      all.push_back({a, 2, b});
    }
  }
  const DatasetSplit s = SplitDataset(all, {}, 5, /*group_by_pair=*/true);
  EXPECT_EQ(s.total(), all.size());
  auto pair_of = [](const Triplet& t) {
    return std::minmax(t.head, t.tail);
  };
  std::map<std::pair<EntityId, EntityId>, int> bucket;
  int which = 0;
  for (const auto* part : {&s.train, &s.valid, &s.test}) {
    for (const Triplet& t : *part) {
      auto [it, inserted] = bucket.emplace(pair_of(t), which);
      EXPECT_EQ(it->second, which);
    }
    ++which;
  }
}

TEST(FilterIndexTest, SingleTriplet) {
  DatasetSplit s;
  s.train = {{0, 0, 1}};
  const FilterIndex index(s);
  const auto tails = index.KnownTails(0, 0);
  ASSERT_EQ(tails.size(), 1u);
  EXPECT_EQ(tails[0], 1u);
  EXPECT_FALSE(index.Contains({1, 0, 0}));
  EXPECT_TRUE(index.KnownTails(5, 0).empty());
}

TEST(FilterIndexTest, TestOnlyTripletIsIndexed) {
  DatasetSplit s;
  s.train = {{0, 0, 1}};
  s.test = {{2, 1, 3}};
  const FilterIndex index(s);
  EXPECT_TRUE(index.Contains({2, 1, 3}));
  EXPECT_EQ(index.KnownHeads(1, 3).size(), 1u);
}

TEST(FilterIndexTest, AgreesWithLinearScan) {
  Rng rng(17);
  DatasetSplit s;
  std::vector<std::vector<Triplet>*> parts{&s.train, &s.valid, &s.test};
  for (int i = 0; i < 400; ++i) {
    const Triplet t{static_cast<EntityId>(rng.UniformInt(20)),
                    static_cast<RelationId>(rng.UniformInt(3)),
                    static_cast<EntityId>(rng.UniformInt(20))};
    parts[rng.UniformInt(3)]->push_back(t);
  }
  const FilterIndex index(s);
  auto scan = [&](const Triplet& q) {
    for (const auto* p : parts) {
      if (std::find(p->begin(), p->end(), q) != p->end()) return true;
    }
    return false;
  };
  for (int probe = 0; probe < 1000; ++probe) {
    const Triplet q{static_cast<EntityId>(rng.UniformInt(20)),
                    static_cast<RelationId>(rng.UniformInt(3)),
                    static_cast<EntityId>(rng.UniformInt(20))};
    EXPECT_EQ(index.Contains(q), scan(q));
    const auto tails = index.KnownTails(q.head, q.relation);
    EXPECT_EQ(std::binary_search(tails.begin(), tails.end(), q.tail), scan(q));
    const auto heads = index.KnownHeads(q.relation, q.tail);
    EXPECT_EQ(std::binary_search(heads.begin(), heads.end(), q.head), scan(q));
  }
}

TEST(SynthKgTest, ZeroDensityIsEmpty) {
  SynthParams p;
  p.density = 0.0;
  EXPECT_TRUE(SynthKg(p).triplets.empty());
}

TEST(SynthKgTest, SingleClusterFullDensityEnumeratesPairs) {
  SynthParams p;
  p.num_entities = 9;
  p.num_relations = 1;
  p.num_clusters = 1;
  p.density = 1.0;
  const Dataset ds = SynthKg(p);
  std::set<Triplet> expected;
  for (EntityId h = 0; h < 9; ++h) {
    for (EntityId t = 0; t < 9; ++t) {
      if (h != t) expected.insert({h, 0, t});
    }
  }
  EXPECT_EQ(std::set<Triplet>(ds.triplets.begin(), ds.triplets.end()), expected);
  EXPECT_EQ(ds.triplets.size(), 72u);
}

TEST(SynthKgTest, DeterministicBySeed) {
  SynthParams p;
  p.seed = 21;
  p.noise_rate = 0.1;
  const Dataset a = SynthKg(p);
  const Dataset b = SynthKg(p);
  EXPECT_EQ(a.triplets, b.triplets);
  EXPECT_EQ(FormatTsv(a.vocab, a.triplets), FormatTsv(b.vocab, b.triplets));
  p.seed = 22;
  EXPECT_NE(SynthKg(p).triplets, a.triplets);
}

TEST(SynthKgTest, NoiseFreeTripletsRespectClusters) {
  SynthParams p;
  p.num_entities = 40;
  p.num_relations = 6;
  p.num_clusters = 4;
  p.density = 0.5;
  p.seed = 3;
  const Dataset ds = SynthKg(p);
  const auto cluster = SynthClusters(p);
  std::map<RelationId, std::set<std::pair<size_t, size_t>>> links;
  for (const Triplet& t : ds.triplets) {
    EXPECT_NE(t.head, t.tail);
    links[t.relation].insert({cluster[t.head], cluster[t.tail]});
  }
  for (const auto& [r, pairs] : links) EXPECT_EQ(pairs.size(), 1u) << r;
}

TEST(SynthKgTest, OutOfRangeParametersThrow) {
  SynthParams p;
  p.density = 1.5;
  EXPECT_THROW(SynthKg(p), DomainError);
  p = SynthParams();
  p.num_clusters = 100;
  EXPECT_THROW(SynthKg(p), DomainError);
  p = SynthParams();
  p.noise_rate = -0.1;
  EXPECT_THROW(SynthKg(p), DomainError);
}

TEST(SynthKgTest, ReingestsLosslessly) {
  SynthParams p;
  p.seed = 8;
  const Dataset ds = SynthKg(p);
  const Dataset again = Parse(FormatTsv(ds.vocab, ds.triplets));
  EXPECT_EQ(again.triplets.size(), ds.triplets.size());
  EXPECT_EQ(FormatTsv(again.vocab, again.triplets),
            FormatTsv(ds.vocab, ds.triplets));
}

TEST(SplitManifestTest, RoundTripResolvesRelativePaths) {
  const fs::path dir = TempDir("manifest");
  WriteSplitManifest((dir / "split.manifest").string(),
                     {"entities.tsv", "relations.tsv", "train.tsv", "valid.tsv",
                      "/abs/test.tsv", 77});
  const SplitManifest m = ReadSplitManifest((dir / "split.manifest").string());
  EXPECT_EQ(m.entities, (dir / "entities.tsv").string());
  EXPECT_EQ(m.test, "/abs/test.tsv");
  EXPECT_EQ(m.seed, 77u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ddiadv
