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

#ifndef DDIADV_SCORERS_H_
#define DDIADV_SCORERS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddiadv/kgstore.h"
#include "ddiadv/numkit.h"
#include "ddiadv/rng.h"

namespace ddiadv {

// All scorers report "higher is more plausible"; distance-based scorers
// (TransE, RotatE) return the negated distance.
enum class ScorerTag { kTransE = 0, kDistMult = 1, kComplEx = 2, kSimplE = 3, kRotatE = 4 };

enum class DistanceNorm { kL1 = 1, kL2 = 2 };

std::string_view ScorerName(ScorerTag tag);
std::optional<ScorerTag> ParseScorerTag(std::string_view name);

// Row widths for an embedding dimension d.
//   TransE, DistMult: entity d, relation d.
//   ComplEx:          entity [re | im] 2d, relation [re | im] 2d.
//   SimplE:           entity [head role | tail role] 2d,
//                     relation [forward | inverse] 2d.
//   RotatE:           entity [re | im] 2d, relation d phase angles.
size_t EntityWidth(ScorerTag tag, size_t dim);
size_t RelationWidth(ScorerTag tag, size_t dim);

struct ScorerKind {
  ScorerTag tag = ScorerTag::kComplEx;
  DistanceNorm norm = DistanceNorm::kL2;  // TransE only
  size_t dim = 0;
};

// Raw kernels over rows; `tail` may be any vector of entity width, e.g. a soft
// embedding lookup.
double ScoreRows(const ScorerKind& kind, std::span<const double> head,
                 std::span<const double> relation, std::span<const double> tail);

// Adds scale * d(score)/d(row) into each gradient buffer. At the
// non-differentiable zero of a distance the zero subgradient is used.
void AccumulateScoreGradients(const ScorerKind& kind,
                              std::span<const double> head,
                              std::span<const double> relation,
                              std::span<const double> tail, double scale,
                              std::span<double> grad_head,
                              std::span<double> grad_relation,
                              std::span<double> grad_tail);

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(ScorerKind kind, size_t num_entities, size_t num_relations);

  // Entity rows and non-RotatE relation rows ~ U[-6/sqrt(d), 6/sqrt(d)];
  // RotatE phases ~ U[-pi, pi].
  static EmbeddingModel Initialized(ScorerKind kind, size_t num_entities,
                                    size_t num_relations, Rng& rng);

  const ScorerKind& kind() const { return kind_; }
  ScorerTag tag() const { return kind_.tag; }
  size_t dim() const { return kind_.dim; }
  size_t num_entities() const { return entities_.rows(); }
  size_t num_relations() const { return relations_.rows(); }

  DenseMatrix& entities() { return entities_; }
  const DenseMatrix& entities() const { return entities_; }
  DenseMatrix& relations() { return relations_; }
  const DenseMatrix& relations() const { return relations_; }

  // Throws LookupError for ids out of range.
  void CheckIds(const Triplet& t) const;

  bool operator==(const EmbeddingModel& other) const {
    return kind_.tag == other.kind_.tag && kind_.norm == other.kind_.norm &&
           kind_.dim == other.kind_.dim && entities_ == other.entities_ &&
           relations_ == other.relations_;
  }

 private:
  ScorerKind kind_;
  DenseMatrix entities_;
  DenseMatrix relations_;
};

double Score(const EmbeddingModel& model, const Triplet& t);

// Entry i is Score with entity i substituted on `side`. Uses the same kernel
// as Score, so the values agree bit for bit.
std::vector<double> ScoreAllCandidates(const EmbeddingModel& model,
                                       const Triplet& partial, Side side);

struct TripletGradients {
  std::vector<double> head;
  std::vector<double> relation;
  std::vector<double> tail;
};

TripletGradients ScoreGradients(const EmbeddingModel& model, const Triplet& t);

}  // namespace ddiadv

#endif  // DDIADV_SCORERS_H_
