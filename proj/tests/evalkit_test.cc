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

#include "ddiadv/evalkit.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <vector>

#include "ddiadv/error.h"
#include "ddiadv/kgstore.h"
#include "ddiadv/rng.h"
#include "ddiadv/scorers.h"
#include "gtest/gtest.h"

namespace ddiadv {
namespace {

// DistMult with d = 1 and relation weight 1: score(h, r, t) = e_h * e_t.
// Scores of (anchor, r, e) are then just e_e scaled by e_anchor.
EmbeddingModel ScalarModel(const std::vector<double>& entity_values,
                           size_t num_relations = 1) {
  EmbeddingModel m({ScorerTag::kDistMult, DistanceNorm::kL2, 1},
                   entity_values.size(), num_relations);
  for (size_t i = 0; i < entity_values.size(); ++i) {
    m.entities()(i, 0) = entity_values[i];
  }
  for (size_t r = 0; r < num_relations; ++r) m.relations()(r, 0) = 1.0;
  return m;
}

// Brute-force threshold sweep: for every distinct score taken as a
// threshold (descending), count predicted positives by scanning all items.
struct SweepPoint {
  uint64_t tp;
  uint64_t fp;
};

std::vector<SweepPoint> ThresholdSweep(const std::vector<double>& scores,
                                       const std::vector<bool>& labels) {
  std::vector<double> thresholds(scores.begin(), scores.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  std::vector<SweepPoint> points{{0, 0}};
  for (double th : thresholds) {
    SweepPoint p{0, 0};
    for (size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= th) (labels[i] ? p.tp : p.fp)++;
    }
    points.push_back(p);
  }
  return points;
}

double OracleRocAuc(const std::vector<double>& scores,
                    const std::vector<bool>& labels) {
  const auto pts = ThresholdSweep(scores, labels);
  const uint64_t pos = pts.back().tp, neg = pts.back().fp;
  // Trapezoids in integer units: sum (dfp) * (tp_prev + tp).
  uint64_t twice_area = 0;
  for (size_t k = 1; k < pts.size(); ++k) {
    twice_area += (pts[k].fp - pts[k - 1].fp) * (pts[k].tp + pts[k - 1].tp);
  }
  return static_cast<double>(twice_area) / static_cast<double>(2 * pos * neg);
}

double OraclePrAuc(const std::vector<double>& scores,
                   const std::vector<bool>& labels) {
  const auto pts = ThresholdSweep(scores, labels);
  const uint64_t pos = pts.back().tp;
  double area = 0.0;
  for (size_t k = 1; k < pts.size(); ++k) {
    const uint64_t dtp = pts[k].tp - pts[k - 1].tp;
    area += static_cast<double>(dtp) / static_cast<double>(pos) *
            (static_cast<double>(pts[k].tp) /
             static_cast<double>(pts[k].tp + pts[k].fp));
  }
  return area;
}

TEST(FilteredRankTest, StrictlyHighestIsRankOne) {
  const auto m = ScalarModel({1.0, 5.0, 2.0, 3.0});
  DatasetSplit s;
  s.test = {{0, 0, 1}};
  const FilterIndex index(s);
  EXPECT_EQ(FilteredRank(m, index, s.test[0], Side::kTail).rank, 1.0);
}

TEST(FilteredRankTest, HandRankedFiveEntityToy) {
  // Tail candidates of (0, r, ?) score e_0 * e_i = e_i.
  const auto m = ScalarModel({1.0, 0.5, 0.9, 0.7, 0.2});
  DatasetSplit s;
  s.test = {{0, 0, 3}};
  s.train = {{0, 0, 2}};  // filtered competitor above the target
  const FilterIndex index(s);
  // Unfiltered order: 1.0 (e0), 0.9 (e2), 0.7 (e3) ...; e2 is removed.
  EXPECT_EQ(FilteredRank(m, index, s.test[0], Side::kTail).rank, 2.0);
  EXPECT_EQ(RankOracle(m, s, s.test[0], Side::kTail), 2.0);
  DatasetSplit unfiltered;
  unfiltered.test = s.test;
  const FilterIndex bare(unfiltered);
  EXPECT_EQ(FilteredRank(m, bare, s.test[0], Side::kTail).rank, 3.0);
}

TEST(FilteredRankTest, AllTiesGiveMidRank) {
  const auto m = ScalarModel(std::vector<double>(7, 1.0));
  DatasetSplit s;
  s.test = {{0, 0, 3}};
  s.train = {{0, 0, 5}};
  const FilterIndex index(s);
  // 6 survivors including the target: 1 + 5 / 2.
  EXPECT_EQ(FilteredRank(m, index, s.test[0], Side::kTail).rank, 3.5);
  EXPECT_EQ(RankOracle(m, s, s.test[0], Side::kTail), 3.5);
}

TEST(FilteredRankTest, TwoEntitiesGiveOnlyThreeValues) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double a = std::round(rng.Uniform() * 2.0);
    const double b = std::round(rng.Uniform() * 2.0);
    const auto m = ScalarModel({a, b});
    DatasetSplit s;
    s.test = {{0, 0, 1}};
    const FilterIndex index(s);
    for (Side side : {Side::kHead, Side::kTail}) {
      const double r = FilteredRank(m, index, s.test[0], side).rank;
      EXPECT_TRUE(r == 1.0 || r == 1.5 || r == 2.0) << r;
    }
  }
}

TEST(FilteredRankTest, AgreesWithOracleOnSyntheticKg) {
  SynthParams p;
  p.num_entities = 50;
  p.num_relations = 5;
  p.seed = 4;
  const Dataset ds = SynthKg(p);
  const DatasetSplit split = SplitDataset(ds.triplets, {}, 4);
  const FilterIndex index(split);
  Rng rng(5);
  for (ScorerTag tag : {ScorerTag::kDistMult, ScorerTag::kComplEx,
                        ScorerTag::kTransE}) {
    auto m = EmbeddingModel::Initialized({tag, DistanceNorm::kL1, 4}, 50, 5, rng);
    // Coarse values force many exact ties.
    for (double& v : m.entities().values()) v = std::round(v);
    for (double& v : m.relations().values()) v = std::round(v);
    for (int probe = 0; probe < 300; ++probe) {
      const Triplet& t = split.test[rng.UniformInt(split.test.size())];
      const Side side = rng.Bernoulli(0.5) ? Side::kHead : Side::kTail;
      EXPECT_EQ(FilteredRank(m, index, t, side).rank,
                RankOracle(m, split, t, side));
    }
  }
}

TEST(FilteredRankTest, AddingKnownTripletsNeverRaisesRank) {
  Rng rng(6);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kComplEx, DistanceNorm::kL2, 3}, 30, 2, rng);
  DatasetSplit s;
  s.test = {{3, 1, 8}};
  FilterIndex index(s);
  double previous = FilteredRank(m, index, s.test[0], Side::kTail).rank;
  for (int i = 0; i < 40; ++i) {
    index.Add({3, 1, static_cast<EntityId>(rng.UniformInt(30))});
    const double now = FilteredRank(m, index, s.test[0], Side::kTail).rank;
    EXPECT_LE(now, previous);
    previous = now;
  }
}

TEST(RankMetricsTest, SinglePerfectTriplet) {
  const MetricsReport r = RankMetrics(std::vector<double>{1.0, 1.0});
  EXPECT_EQ(r.mr, 1.0);
  EXPECT_EQ(r.mrr, 1.0);
  EXPECT_EQ(r.hits1, 1.0);
  EXPECT_EQ(r.hits10, 1.0);
}

TEST(RankMetricsTest, HandComputedPair) {
  const MetricsReport r = RankMetrics(std::vector<double>{1.0, 4.0});
  EXPECT_DOUBLE_EQ(r.mr, 2.5);
  EXPECT_DOUBLE_EQ(r.mrr, 0.625);
  EXPECT_DOUBLE_EQ(r.hits1, 0.5);
  EXPECT_DOUBLE_EQ(r.hits3, 0.5);
  EXPECT_DOUBLE_EQ(r.hits10, 1.0);
  EXPECT_EQ(r.count, 2u);
}

TEST(RankMetricsTest, EmptyIsEvaluationError) {
  EXPECT_THROW(RankMetrics(std::vector<double>{}), EvaluationError);
}

TEST(RankMetricsTest, BoundsAndHitsMonotone) {
  Rng rng(7);
  for (int probe = 0; probe < 200; ++probe) {
    std::vector<double> ranks(1 + rng.UniformInt(50));
    for (double& r : ranks) r = 1.0 + 0.5 * rng.UniformInt(60);
    const MetricsReport m = RankMetrics(ranks);
    EXPECT_LE(m.hits1, m.hits3);
    EXPECT_LE(m.hits3, m.hits10);
    EXPECT_GE(m.mr, 1.0);
    const double max_rank = *std::max_element(ranks.begin(), ranks.end());
    EXPECT_GE(m.mrr, 1.0 / max_rank - 1e-15);
    EXPECT_LE(m.mrr, 1.0);
  }
}

TEST(LinkPredictionTest, BothSidesAndWorkerInvariance) {
  SynthParams p;
  p.seed = 8;
  const Dataset ds = SynthKg(p);
  const DatasetSplit split = SplitDataset(ds.triplets, {}, 8);
  const FilterIndex index(split);
  Rng rng(9);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kSimplE, DistanceNorm::kL2, 4}, ds.vocab.num_entities(),
      ds.vocab.num_relations(), rng);
  const auto one = LinkPrediction(m, split, index, 1);
  const auto four = LinkPrediction(m, split, index, 4);
  ASSERT_EQ(one.ranks.size(), 2 * split.test.size());
  EXPECT_EQ(one.ranks[0].side, Side::kTail);
  EXPECT_EQ(one.ranks[1].side, Side::kHead);
  EXPECT_EQ(one.report.mrr, four.report.mrr);
  EXPECT_EQ(one.report.mr, four.report.mr);
  DatasetSplit empty = split;
  empty.test.clear();
  EXPECT_THROW(LinkPrediction(m, empty, index), EvaluationError);
}

TEST(AucTest, PerfectSeparation) {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  const std::vector<bool> l{true, true, false, false};
  EXPECT_EQ(RocAuc(s, l), 1.0);
  EXPECT_EQ(PrAuc(s, l), 1.0);
}

TEST(AucTest, NeedsBothClasses) {
  const std::vector<double> s{0.9, 0.8};
  EXPECT_THROW(RocAuc(s, {true, true}), EvaluationError);
  EXPECT_THROW(PrAuc(s, {false, false}), EvaluationError);
}

TEST(AucTest, ExactlyMatchesThresholdSweep) {
  Rng rng(10);
  for (int toy = 0; toy < 200; ++toy) {
    const size_t n = 2 + rng.UniformInt(19);
    std::vector<double> s(n);
    std::vector<bool> l(n);
    for (size_t i = 0; i < n; ++i) {
      s[i] = 0.25 * static_cast<double>(rng.UniformInt(6));  // ties likely
      l[i] = rng.Bernoulli(0.4);
    }
    l[0] = true;
    l[1] = false;
    EXPECT_EQ(RocAuc(s, l), OracleRocAuc(s, l));
    EXPECT_EQ(PrAuc(s, l), OraclePrAuc(s, l));
  }
}

TEST(AucTest, RocInvariantUnderMonotoneTransform) {
  Rng rng(11);
  for (int toy = 0; toy < 100; ++toy) {
    const size_t n = 10 + rng.UniformInt(40);
    std::vector<double> s(n), t(n);
    std::vector<bool> l(n);
    for (size_t i = 0; i < n; ++i) {
      s[i] = rng.Uniform() * 4.0 - 2.0;
      t[i] = std::exp(3.0 * s[i]) + 7.0;
      l[i] = rng.Bernoulli(0.5);
    }
    l[0] = true;
    l[1] = false;
    EXPECT_EQ(RocAuc(s, l), RocAuc(t, l));
    EXPECT_EQ(PrAuc(s, l), PrAuc(t, l));
  }
}

TEST(PrecisionAtKTest, SingleTrueLabelOnTop) {
  const std::vector<double> s{0.1, 0.9, 0.3, 0.2, 0.0, -1.0};
  const std::vector<bool> l{false, true, false, false, false, false};
  EXPECT_EQ(PrecisionAtK(s, l, 1), 1.0);
  EXPECT_DOUBLE_EQ(PrecisionAtK(s, l, 3), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(PrecisionAtK(s, l, 5), 1.0 / 5.0);
}

TEST(DdiClassificationTest, ThreePairToy) {
  // Four entities, three relations; DistMult d = 1 with per-relation weights.
  EmbeddingModel m({ScorerTag::kDistMult, DistanceNorm::kL2, 1}, 4, 3);
  const double ent[] = {1.0, 2.0, -1.0, 0.5};
  const double rel[] = {0.3, -0.2, 0.8};
  for (int i = 0; i < 4; ++i) m.entities()(i, 0) = ent[i];
  for (int r = 0; r < 3; ++r) m.relations()(r, 0) = rel[r];
  DatasetSplit split;
  split.train = {{0, 2, 1}, {2, 1, 3}};
  split.test = {{0, 0, 1}, {3, 1, 2}, {0, 2, 3}};
  const std::vector<RelationId> universe{0, 1, 2};
  const auto result = DdiClassification(m, split, universe);

  ASSERT_EQ(result.pairs.size(), 3u);
  EXPECT_EQ(result.pairs[0], std::make_pair(EntityId{0}, EntityId{1}));
  EXPECT_EQ(result.pairs[1], std::make_pair(EntityId{2}, EntityId{3}));
  EXPECT_EQ(result.pairs[2], std::make_pair(EntityId{0}, EntityId{3}));
  // Pair (0,1): product 2 -> scores (0.6, -0.4, 1.6), labels {0, 2}.
  // Pair (2,3): product -0.5 -> (-0.15, 0.1, -0.4), labels {1}.
  // Pair (0,3): product 0.5 -> (0.15, -0.1, 0.4), labels {2}.
  const std::vector<double> expected_scores{0.6, -0.4, 1.6, -0.15, 0.1, -0.4,
                                            0.15, -0.1, 0.4};
  const std::vector<bool> expected_labels{true, false, true, false, true,
                                          false, false, false, true};
  ASSERT_EQ(result.scores.size(), 9u);
  for (size_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(result.scores[i], expected_scores[i], 1e-15) << i;
  }
  EXPECT_EQ(result.labels, expected_labels);
  EXPECT_EQ(result.report.roc_auc, OracleRocAuc(result.scores, result.labels));
  EXPECT_EQ(result.report.pr_auc, OraclePrAuc(result.scores, result.labels));
  EXPECT_DOUBLE_EQ(result.report.p_at1, 1.0);
  EXPECT_DOUBLE_EQ(result.report.p_at3, (2.0 / 3 + 1.0 / 3 + 1.0 / 3) / 3.0);
  EXPECT_EQ(result.report.count, 3u);
  EXPECT_EQ(result.report.excluded, 0u);
}

TEST(DdiClassificationTest, PairsWithoutTrueLabelAreExcluded) {
  Rng rng(12);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kComplEx, DistanceNorm::kL2, 2}, 5, 3, rng);
  DatasetSplit split;
  split.test = {{0, 0, 1}, {2, 2, 3}, {1, 1, 4}};
  const std::vector<RelationId> universe{0, 1};
  const auto result = DdiClassification(m, split, universe);
  EXPECT_EQ(result.report.excluded, 1u);
  EXPECT_EQ(result.report.count, 2u);
  EXPECT_GE(result.report.roc_auc, 0.0);
  EXPECT_LE(result.report.roc_auc, 1.0);
  EXPECT_GE(result.report.pr_auc, 0.0);
  EXPECT_LE(result.report.pr_auc, 1.0);
}

TEST(CsvTest, HistogramAndCurves) {
  std::vector<RankResult> ranks{{{0, 0, 1}, Side::kTail, 1.0},
                                {{0, 0, 1}, Side::kHead, 2.5},
                                {{1, 0, 2}, Side::kTail, 1.0}};
  EXPECT_EQ(RankHistogramCsv(ranks), "rank,count\n1,2\n2.5,1\n");
  const std::string curves =
      CurveCsv(std::vector<double>{0.9, 0.1}, std::vector<bool>{true, false});
  EXPECT_EQ(curves.substr(0, curves.find('\n')), "curve,x,y");
  EXPECT_NE(curves.find("roc,"), std::string::npos);
  EXPECT_NE(curves.find("pr,"), std::string::npos);
}

TEST(MetricsReportTest, TableAndCsv) {
  MetricsReport r = RankMetrics(std::vector<double>{1.0, 4.0});
  r.config_hash = "abc";
  EXPECT_NE(r.ToTable().find("MRR"), std::string::npos);
  EXPECT_EQ(r.CsvHeader(), "task,MR,MRR,HITS@1,HITS@3,HITS@10,count,config_hash\n");
  EXPECT_EQ(r.CsvRow().substr(0, 7), "lp,2.5,");
}

TEST(ParallelForTest, VisitsEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(100);
  ParallelFor(100, 4, [&](size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(ParallelFor(10, 3,
                           [](size_t i) {
                             if (i == 7) throw EvaluationError("boom");
                           }),
               EvaluationError);
}

}  // namespace
}  // namespace ddiadv
