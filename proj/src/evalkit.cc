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
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "ddiadv/error.h"

namespace ddiadv {
namespace {

EntityId TrueEntity(const Triplet& t, Side side) {
  return side == Side::kTail ? t.tail : t.head;
}

Triplet Substitute(const Triplet& t, Side side, EntityId e) {
  Triplet out = t;
  (side == Side::kTail ? out.tail : out.head) = e;
  return out;
}

void CheckLabels(std::span<const double> scores,
                 const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("scores and labels differ in length");
  }
}

// Descending-score groups of exact ties: (tp, fp) counts per group.
std::vector<std::pair<uint64_t, uint64_t>> TieGroupsDescending(
    std::span<const double> scores, const std::vector<bool>& labels) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  std::vector<std::pair<uint64_t, uint64_t>> groups;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    uint64_t tp = 0, fp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] ? ++tp : ++fp;
      ++j;
    }
    groups.emplace_back(tp, fp);
    i = j;
  }
  return groups;
}

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string Full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RankResult FilteredRank(const EmbeddingModel& model, const FilterIndex& index,
                        const Triplet& test, Side side) {
  const std::vector<double> scores = ScoreAllCandidates(model, test, side);
  const EntityId target = TrueEntity(test, side);
  const double target_score = scores[target];
  const auto known = index.Known(test, side);
  size_t greater = 0;
  size_t ties = 0;
  auto next_known = known.begin();
  for (EntityId e = 0; e < scores.size(); ++e) {
    while (next_known != known.end() && *next_known < e) ++next_known;
    if (e == target) continue;
    if (next_known != known.end() && *next_known == e) continue;
    if (scores[e] > target_score) {
      ++greater;
    } else if (scores[e] == target_score) {
      ++ties;
    }
  }
  return {test, side,
          1.0 + static_cast<double>(greater) + static_cast<double>(ties) / 2.0};
}

double RankOracle(const EmbeddingModel& model, const DatasetSplit& split,
                  const Triplet& test, Side side) {
  std::set<Triplet> known;
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    known.insert(part->begin(), part->end());
  }
  const EntityId target = TrueEntity(test, side);
  std::vector<std::pair<double, EntityId>> candidates;
  for (EntityId e = 0; e < model.num_entities(); ++e) {
    const Triplet cand = Substitute(test, side, e);
    if (e != target && known.count(cand) > 0) continue;
    candidates.emplace_back(Score(model, cand), e);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double target_score = 0.0;
  for (const auto& [s, e] : candidates) {
    if (e == target) target_score = s;
  }
  // 1-based positions spanned by the tie block containing the target.
  size_t first = 0;
  while (candidates[first].first != target_score) ++first;
  size_t last = first;
  while (last + 1 < candidates.size() &&
         candidates[last + 1].first == target_score) {
    ++last;
  }
  return (static_cast<double>(first + 1) + static_cast<double>(last + 1)) / 2.0;
}

MetricsReport RankMetrics(std::span<const double> ranks) {
  if (ranks.empty()) throw EvaluationError("no rank observations");
  MetricsReport r;
  r.task = "lp";
  for (double rank : ranks) {
    r.mr += rank;
    r.mrr += 1.0 / rank;
    r.hits1 += rank <= 1.0 ? 1.0 : 0.0;
    r.hits3 += rank <= 3.0 ? 1.0 : 0.0;
    r.hits10 += rank <= 10.0 ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(ranks.size());
  r.mr /= n;
  r.mrr /= n;
  r.hits1 /= n;
  r.hits3 /= n;
  r.hits10 /= n;
  r.count = ranks.size();
  return r;
}

void ParallelFor(size_t n, size_t workers,
                 const std::function<void(size_t)>& fn) {
  workers = std::max<size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

LinkPredictionResult LinkPrediction(const EmbeddingModel& model,
                                    const DatasetSplit& split,
                                    const FilterIndex& index, size_t workers) {
  if (split.test.empty()) throw EvaluationError("empty test set");
  LinkPredictionResult result;
  result.ranks.resize(2 * split.test.size());
  ParallelFor(split.test.size(), workers, [&](size_t i) {
    result.ranks[2 * i] = FilteredRank(model, index, split.test[i], Side::kTail);
    result.ranks[2 * i + 1] =
        FilteredRank(model, index, split.test[i], Side::kHead);
  });
  std::vector<double> ranks;
  ranks.reserve(result.ranks.size());
  for (const auto& r : result.ranks) ranks.push_back(r.rank);
  result.report = RankMetrics(ranks);
  return result;
}

double RocAuc(std::span<const double> scores, const std::vector<bool>& labels) {
  CheckLabels(scores, labels);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  uint64_t positives = 0;
  uint64_t twice_rank_sum = 0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Mid-rank of 1-based positions i+1..j is (i+1+j)/2.
    for (size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        ++positives;
        twice_rank_sum += i + 1 + j;
      }
    }
    i = j;
  }
  const uint64_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw EvaluationError("ROC-AUC needs both positive and negative labels");
  }
  const uint64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) /
         static_cast<double>(2 * positives * negatives);
}

double PrAuc(std::span<const double> scores, const std::vector<bool>& labels) {
  CheckLabels(scores, labels);
  const auto groups = TieGroupsDescending(scores, labels);
  uint64_t positives = 0;
  for (const auto& g : groups) positives += g.first;
  if (positives == 0) {
    throw EvaluationError("PR-AUC needs at least one positive label");
  }
  uint64_t tp = 0, fp = 0;
  double area = 0.0;
  for (const auto& [dtp, dfp] : groups) {
    tp += dtp;
    fp += dfp;
    area += static_cast<double>(dtp) / static_cast<double>(positives) *
            (static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  return area;
}

double PrecisionAtK(std::span<const double> scores,
                    const std::vector<bool>& labels, size_t k) {
  CheckLabels(scores, labels);
  if (k == 0) throw DomainError("P@K needs K >= 1");
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  size_t hits = 0;
  for (size_t i = 0; i < std::min(k, order.size()); ++i) {
    if (labels[order[i]]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

ClassificationResult DdiClassification(
    const EmbeddingModel& model, const DatasetSplit& split,
    std::span<const RelationId> label_universe, size_t workers) {
  if (split.test.empty()) throw EvaluationError("empty test set");
  if (label_universe.empty()) throw EvaluationError("empty label universe");
  for (RelationId r : label_universe) {
    if (r >= model.num_relations()) {
      throw EvaluationError("label universe relation " + std::to_string(r) +
                            " exceeds model's " +
                            std::to_string(model.num_relations()) +
                            " relations");
    }
  }
  std::map<std::pair<EntityId, EntityId>, std::set<RelationId>> linked;
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    for (const Triplet& t : *part) {
      linked[std::minmax(t.head, t.tail)].insert(t.relation);
    }
  }
  std::vector<std::pair<EntityId, EntityId>> pairs;
  std::set<std::pair<EntityId, EntityId>> seen;
  for (const Triplet& t : split.test) {
    const auto key = std::minmax(t.head, t.tail);
    if (seen.insert(key).second) pairs.push_back(key);
  }

  const size_t n_labels = label_universe.size();
  std::vector<std::vector<double>> pair_scores(pairs.size());
  std::vector<std::vector<bool>> pair_labels(pairs.size());
  ParallelFor(pairs.size(), workers, [&](size_t p) {
    const auto [a, b] = pairs[p];
    const auto& truth = linked.at(pairs[p]);
    pair_scores[p].resize(n_labels);
    pair_labels[p].resize(n_labels);
    for (size_t k = 0; k < n_labels; ++k) {
      const RelationId r = label_universe[k];
      pair_scores[p][k] =
          std::max(Score(model, {a, r, b}), Score(model, {b, r, a}));
      pair_labels[p][k] = truth.count(r) > 0;
    }
  });

  ClassificationResult result;
  result.report.task = "clf";
  size_t kept = 0;
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto& labels = pair_labels[p];
    if (std::none_of(labels.begin(), labels.end(), [](bool b) { return b; })) {
      ++result.report.excluded;
      continue;
    }
    ++kept;
    result.report.p_at1 += PrecisionAtK(pair_scores[p], labels, 1);
    result.report.p_at3 += PrecisionAtK(pair_scores[p], labels, 3);
    result.report.p_at5 += PrecisionAtK(pair_scores[p], labels, 5);
    result.scores.insert(result.scores.end(), pair_scores[p].begin(),
                         pair_scores[p].end());
    result.labels.insert(result.labels.end(), labels.begin(), labels.end());
    result.pairs.push_back(pairs[p]);
  }
  if (kept == 0) throw EvaluationError("no test pair has a true label");
  result.report.p_at1 /= static_cast<double>(kept);
  result.report.p_at3 /= static_cast<double>(kept);
  result.report.p_at5 /= static_cast<double>(kept);
  result.report.count = kept;
  result.report.roc_auc = RocAuc(result.scores, result.labels);
  result.report.pr_auc = PrAuc(result.scores, result.labels);
  return result;
}

std::string MetricsReport::ToTable() const {
  std::string out;
  auto line = [&out](const std::string& k, const std::string& v) {
    out += k;
    out.append(k.size() < 10 ? 10 - k.size() : 1, ' ');
    out += v + "\n";
  };
  line("task", task);
  if (task == "lp") {
    line("MR", Fixed(mr));
    line("MRR", Fixed(mrr));
    line("HITS@1", Fixed(hits1));
    line("HITS@3", Fixed(hits3));
    line("HITS@10", Fixed(hits10));
    line("ranks", std::to_string(count));
  } else {
    line("ROC-AUC", Fixed(roc_auc));
    line("PR-AUC", Fixed(pr_auc));
    line("P@1", Fixed(p_at1));
    line("P@3", Fixed(p_at3));
    line("P@5", Fixed(p_at5));
    line("pairs", std::to_string(count));
    line("excluded", std::to_string(excluded));
  }
  if (!config_hash.empty()) line("config", config_hash);
  return out;
}

std::string MetricsReport::CsvHeader() const {
  return task == "lp" ? "task,MR,MRR,HITS@1,HITS@3,HITS@10,count,config_hash\n"
                      : "task,ROC-AUC,PR-AUC,P@1,P@3,P@5,count,excluded,"
                        "config_hash\n";
}

std::string MetricsReport::CsvRow() const {
  if (task == "lp") {
    return task + "," + Full(mr) + "," + Full(mrr) + "," + Full(hits1) + "," +
           Full(hits3) + "," + Full(hits10) + "," + std::to_string(count) +
           "," + config_hash + "\n";
  }
  return task + "," + Full(roc_auc) + "," + Full(pr_auc) + "," + Full(p_at1) +
         "," + Full(p_at3) + "," + Full(p_at5) + "," + std::to_string(count) +
         "," + std::to_string(excluded) + "," + config_hash + "\n";
}

std::string RankHistogramCsv(std::span<const RankResult> ranks) {
  std::map<double, size_t> hist;
  for (const auto& r : ranks) ++hist[r.rank];
  std::string out = "rank,count\n";
  for (const auto& [rank, count] : hist) {
    out += Full(rank) + "," + std::to_string(count) + "\n";
  }
  return out;
}

std::string CurveCsv(std::span<const double> scores,
                     const std::vector<bool>& labels) {
  CheckLabels(scores, labels);
  const auto groups = TieGroupsDescending(scores, labels);
  uint64_t positives = 0, negatives = 0;
  for (const auto& g : groups) {
    positives += g.first;
    negatives += g.second;
  }
  std::string out = "curve,x,y\n";
  out += "roc,0,0\n";
  uint64_t tp = 0, fp = 0;
  std::string pr;
  for (const auto& [dtp, dfp] : groups) {
    tp += dtp;
    fp += dfp;
    const double tpr = positives ? static_cast<double>(tp) / positives : 0.0;
    const double fpr = negatives ? static_cast<double>(fp) / negatives : 0.0;
    out += "roc," + Full(fpr) + "," + Full(tpr) + "\n";
    pr += "pr," + Full(tpr) + "," +
          Full(static_cast<double>(tp) / static_cast<double>(tp + fp)) + "\n";
  }
  return out + pr;
}

}  // namespace ddiadv
