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

#include "ddiadv/scorers.h"

#include <cmath>
#include <numbers>
#include <string>

#include "ddiadv/error.h"

namespace ddiadv {
namespace {

void CheckWidths(const ScorerKind& kind, size_t head, size_t relation,
                 size_t tail) {
  const size_t ew = EntityWidth(kind.tag, kind.dim);
  if (head != ew || tail != ew || relation != RelationWidth(kind.tag, kind.dim)) {
    throw ShapeError(std::string(ScorerName(kind.tag)) +
                     ": row width mismatch for dim " +
                     std::to_string(kind.dim));
  }
}

}  // namespace

std::string_view ScorerName(ScorerTag tag) {
  switch (tag) {
    case ScorerTag::kTransE:
      return "transe";
    case ScorerTag::kDistMult:
      return "distmult";
    case ScorerTag::kComplEx:
      return "complex";
    case ScorerTag::kSimplE:
      return "simple";
    case ScorerTag::kRotatE:
      return "rotate";
  }
  return "unknown";
}

std::optional<ScorerTag> ParseScorerTag(std::string_view name) {
  for (ScorerTag tag : {ScorerTag::kTransE, ScorerTag::kDistMult,
                        ScorerTag::kComplEx, ScorerTag::kSimplE,
                        ScorerTag::kRotatE}) {
    if (name == ScorerName(tag)) return tag;
  }
  return std::nullopt;
}

size_t EntityWidth(ScorerTag tag, size_t dim) {
  switch (tag) {
    case ScorerTag::kTransE:
    case ScorerTag::kDistMult:
      return dim;
    default:
      return 2 * dim;
  }
}

size_t RelationWidth(ScorerTag tag, size_t dim) {
  switch (tag) {
    case ScorerTag::kTransE:
    case ScorerTag::kDistMult:
    case ScorerTag::kRotatE:
      return dim;
    default:
      return 2 * dim;
  }
}

double ScoreRows(const ScorerKind& kind, std::span<const double> h,
                 std::span<const double> r, std::span<const double> t) {
  CheckWidths(kind, h.size(), r.size(), t.size());
  const size_t d = kind.dim;
  double acc = 0.0;
  switch (kind.tag) {
    case ScorerTag::kTransE:
      if (kind.norm == DistanceNorm::kL1) {
        for (size_t i = 0; i < d; ++i) acc += std::fabs(h[i] + r[i] - t[i]);
        return -acc;
      }
      for (size_t i = 0; i < d; ++i) {
        const double diff = h[i] + r[i] - t[i];
        acc += diff * diff;
      }
      return -std::sqrt(acc);
    case ScorerTag::kDistMult:
      // (h * t) first so that swapping head and tail is bitwise symmetric.
      for (size_t i = 0; i < d; ++i) acc += (h[i] * t[i]) * r[i];
      return acc;
    case ScorerTag::kComplEx:
      // Re(<h, r, conj(t)>)
      for (size_t i = 0; i < d; ++i) {
        const double hr = h[i], hi = h[d + i];
        const double rr = r[i], ri = r[d + i];
        const double tr = t[i], ti = t[d + i];
        acc += hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr;
      }
      return acc;
    case ScorerTag::kSimplE: {
      double forward = 0.0;
      double inverse = 0.0;
      for (size_t i = 0; i < d; ++i) {
        forward += h[i] * r[i] * t[d + i];
        inverse += t[i] * r[d + i] * h[d + i];
      }
      return 0.5 * (forward + inverse);
    }
    case ScorerTag::kRotatE:
      for (size_t i = 0; i < d; ++i) {
        const double c = std::cos(r[i]), s = std::sin(r[i]);
        const double dre = h[i] * c - h[d + i] * s - t[i];
        const double dim = h[i] * s + h[d + i] * c - t[d + i];
        acc += std::sqrt(dre * dre + dim * dim);
      }
      return -acc;
  }
  return 0.0;
}

void AccumulateScoreGradients(const ScorerKind& kind,
                              std::span<const double> h,
                              std::span<const double> r,
                              std::span<const double> t, double scale,
                              std::span<double> gh, std::span<double> gr,
                              std::span<double> gt) {
  CheckWidths(kind, h.size(), r.size(), t.size());
  CheckWidths(kind, gh.size(), gr.size(), gt.size());
  const size_t d = kind.dim;
  switch (kind.tag) {
    case ScorerTag::kTransE: {
      if (kind.norm == DistanceNorm::kL1) {
        for (size_t i = 0; i < d; ++i) {
          const double diff = h[i] + r[i] - t[i];
          const double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
          gh[i] -= scale * sign;
          gr[i] -= scale * sign;
          gt[i] += scale * sign;
        }
        return;
      }
      double sq = 0.0;
      for (size_t i = 0; i < d; ++i) {
        const double diff = h[i] + r[i] - t[i];
        sq += diff * diff;
      }
      const double norm = std::sqrt(sq);
      if (norm == 0.0) return;
      for (size_t i = 0; i < d; ++i) {
        const double u = (h[i] + r[i] - t[i]) / norm;
        gh[i] -= scale * u;
        gr[i] -= scale * u;
        gt[i] += scale * u;
      }
      return;
    }
    case ScorerTag::kDistMult:
      for (size_t i = 0; i < d; ++i) {
        gh[i] += scale * r[i] * t[i];
        gr[i] += scale * h[i] * t[i];
        gt[i] += scale * h[i] * r[i];
      }
      return;
    case ScorerTag::kComplEx:
      for (size_t i = 0; i < d; ++i) {
        const double hr = h[i], hi = h[d + i];
        const double rr = r[i], ri = r[d + i];
        const double tr = t[i], ti = t[d + i];
        gh[i] += scale * (rr * tr + ri * ti);
        gh[d + i] += scale * (rr * ti - ri * tr);
        gr[i] += scale * (hr * tr + hi * ti);
        gr[d + i] += scale * (hr * ti - hi * tr);
        gt[i] += scale * (hr * rr - hi * ri);
        gt[d + i] += scale * (hi * rr + hr * ri);
      }
      return;
    case ScorerTag::kSimplE: {
      const double half = 0.5 * scale;
      for (size_t i = 0; i < d; ++i) {
        gh[i] += half * r[i] * t[d + i];
        gr[i] += half * h[i] * t[d + i];
        gt[d + i] += half * h[i] * r[i];
        gt[i] += half * r[d + i] * h[d + i];
        gr[d + i] += half * t[i] * h[d + i];
        gh[d + i] += half * t[i] * r[d + i];
      }
      return;
    }
    case ScorerTag::kRotatE:
      for (size_t i = 0; i < d; ++i) {
        const double c = std::cos(r[i]), s = std::sin(r[i]);
        const double hr = h[i], hi = h[d + i];
        const double dre = hr * c - hi * s - t[i];
        const double dim = hr * s + hi * c - t[d + i];
        const double mod = std::sqrt(dre * dre + dim * dim);
        if (mod == 0.0) continue;
        const double ure = dre / mod, uim = dim / mod;
        // score = -sum |diff_i|
        gh[i] -= scale * (ure * c + uim * s);
        gh[d + i] -= scale * (-ure * s + uim * c);
        gr[i] -= scale * (ure * (-hr * s - hi * c) + uim * (hr * c - hi * s));
        gt[i] += scale * ure;
        gt[d + i] += scale * uim;
      }
      return;
  }
}

EmbeddingModel::EmbeddingModel(ScorerKind kind, size_t num_entities,
                               size_t num_relations)
    : kind_(kind),
      entities_(num_entities, EntityWidth(kind.tag, kind.dim)),
      relations_(num_relations, RelationWidth(kind.tag, kind.dim)) {
  if (kind.dim == 0) throw DomainError("embedding dimension must be >= 1");
}

EmbeddingModel EmbeddingModel::Initialized(ScorerKind kind,
                                           size_t num_entities,
                                           size_t num_relations, Rng& rng) {
  EmbeddingModel model(kind, num_entities, num_relations);
  const double bound = 6.0 / std::sqrt(static_cast<double>(kind.dim));
  auto fill = [&rng](std::span<double> values, double lo, double hi) {
    for (double& v : values) v = lo + (hi - lo) * rng.Uniform();
  };
  fill(model.entities_.values(), -bound, bound);
  if (kind.tag == ScorerTag::kRotatE) {
    fill(model.relations_.values(), -std::numbers::pi, std::numbers::pi);
  } else {
    fill(model.relations_.values(), -bound, bound);
  }
  return model;
}

void EmbeddingModel::CheckIds(const Triplet& t) const {
  if (t.head >= num_entities() || t.tail >= num_entities() ||
      t.relation >= num_relations()) {
    throw LookupError("triplet (" + std::to_string(t.head) + ", " +
                      std::to_string(t.relation) + ", " +
                      std::to_string(t.tail) + ") out of range for " +
                      std::to_string(num_entities()) + " entities / " +
                      std::to_string(num_relations()) + " relations");
  }
}

double Score(const EmbeddingModel& model, const Triplet& t) {
  model.CheckIds(t);
  return ScoreRows(model.kind(), model.entities().row(t.head),
                   model.relations().row(t.relation),
                   model.entities().row(t.tail));
}

std::vector<double> ScoreAllCandidates(const EmbeddingModel& model,
                                       const Triplet& partial, Side side) {
  model.CheckIds(partial);
  const auto& ent = model.entities();
  const auto rel = model.relations().row(partial.relation);
  std::vector<double> scores(model.num_entities());
  for (size_t e = 0; e < scores.size(); ++e) {
    scores[e] = side == Side::kTail
                    ? ScoreRows(model.kind(), ent.row(partial.head), rel,
                                ent.row(e))
                    : ScoreRows(model.kind(), ent.row(e), rel,
                                ent.row(partial.tail));
  }
  return scores;
}

TripletGradients ScoreGradients(const EmbeddingModel& model,
                                const Triplet& t) {
  model.CheckIds(t);
  const size_t ew = model.entities().cols();
  TripletGradients g{std::vector<double>(ew, 0.0),
                     std::vector<double>(model.relations().cols(), 0.0),
                     std::vector<double>(ew, 0.0)};
  AccumulateScoreGradients(model.kind(), model.entities().row(t.head),
                           model.relations().row(t.relation),
                           model.entities().row(t.tail), 1.0, g.head,
                           g.relation, g.tail);
  return g;
}

}  // namespace ddiadv
