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

#ifndef DDIADV_EVALKIT_H_
#define DDIADV_EVALKIT_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddiadv/kgstore.h"
#include "ddiadv/scorers.h"

namespace ddiadv {

struct RankResult {
  Triplet triplet;
  Side side = Side::kTail;
  // 1 + #(surviving candidates scoring strictly higher) + #(exact ties) / 2.
  double rank = 1.0;
};

// Replaces `side` of the test triplet with every entity, drops candidates
// that form a known triplet (other than the test triplet itself) and ranks
// the true entity by descending score with mid-rank ties.
RankResult FilteredRank(const EmbeddingModel& model, const FilterIndex& index,
                        const Triplet& test, Side side);

// Reference implementation: rebuilds the known set by scanning every split,
// scores candidates one by one, sorts and reads off the mid-rank. Meant for
// small |E|.
double RankOracle(const EmbeddingModel& model, const DatasetSplit& split,
                  const Triplet& test, Side side);

struct MetricsReport {
  std::string task;  // "lp" or "clf"
  // Link prediction.
  double mr = 0.0;
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  // Classification.
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  double p_at1 = 0.0;
  double p_at3 = 0.0;
  double p_at5 = 0.0;
  size_t count = 0;     // rank observations or evaluated pairs
  size_t excluded = 0;  // pairs without a true label
  std::string config_hash;

  std::string ToTable() const;
  std::string CsvHeader() const;
  std::string CsvRow() const;
};

// MR, MRR and HITS@{1,3,10} from rank observations.
MetricsReport RankMetrics(std::span<const double> ranks);

struct LinkPredictionResult {
  MetricsReport report;
  std::vector<RankResult> ranks;  // tail then head per test triplet
};

// Both sides of every test triplet. Work is spread over `workers` threads
// and aggregated in test order.
LinkPredictionResult LinkPrediction(const EmbeddingModel& model,
                                    const DatasetSplit& split,
                                    const FilterIndex& index,
                                    size_t workers = 1);

// Exact ROC-AUC by rank sum with mid-ranks for ties.
double RocAuc(std::span<const double> scores, const std::vector<bool>& labels);
// Exact PR-AUC as the step sum over distinct thresholds:
//   sum_k (recall_k - recall_{k-1}) * precision_k.
double PrAuc(std::span<const double> scores, const std::vector<bool>& labels);

// Top-K by score (ties broken by ascending index), divided by K.
double PrecisionAtK(std::span<const double> scores,
                    const std::vector<bool>& labels, size_t k);

struct ClassificationResult {
  MetricsReport report;
  // Flattened (pair, relation) decisions in pair order.
  std::vector<double> scores;
  std::vector<bool> labels;
  std::vector<std::pair<EntityId, EntityId>> pairs;
};

// Groups test triplets by unordered drug pair. The true label set of a pair
// is every relation in `label_universe` linking it (either direction)
// anywhere in the split; the rest of the universe are negatives. A pair's
// score for relation r is max(score(a, r, b), score(b, r, a)).
ClassificationResult DdiClassification(
    const EmbeddingModel& model, const DatasetSplit& split,
    std::span<const RelationId> label_universe, size_t workers = 1);

// rank,count
std::string RankHistogramCsv(std::span<const RankResult> ranks);
// curve,x,y with ROC (fpr, tpr) and PR (recall, precision) points.
std::string CurveCsv(std::span<const double> scores,
                     const std::vector<bool>& labels);

// Runs fn(i) for i in [0, n) over `workers` threads.
void ParallelFor(size_t n, size_t workers,
                 const std::function<void(size_t)>& fn);

}  // namespace ddiadv

#endif  // DDIADV_EVALKIT_H_
