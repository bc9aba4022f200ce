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

#include "ddiadv/negsamplers.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddiadv/error.h"

namespace ddiadv {
namespace {

void FillUniform(std::span<double> values, double bound, Rng& rng) {
  for (double& v : values) v = -bound + 2.0 * bound * rng.Uniform();
}

double GlorotBound(size_t fan_in, size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

std::string_view SamplerName(SamplerTag tag) {
  switch (tag) {
    case SamplerTag::kUniform:
      return "uniform";
    case SamplerTag::kSelfAdversarial:
      return "self_adversarial";
    case SamplerTag::kAae:
      return "aae";
  }
  return "unknown";
}

std::optional<SamplerTag> ParseSamplerTag(std::string_view name) {
  for (SamplerTag tag :
       {SamplerTag::kUniform, SamplerTag::kSelfAdversarial, SamplerTag::kAae}) {
    if (name == SamplerName(tag)) return tag;
  }
  return std::nullopt;
}

NegativeSample UniformCorrupt(const Triplet& positive, size_t num_entities,
                              Rng& rng) {
  if (num_entities < 2) {
    throw SamplerError("uniform corruption needs at least 2 entities");
  }
  NegativeSample neg;
  neg.corrupted = positive;
  neg.corrupted_side = rng.Bernoulli(0.5) ? Side::kHead : Side::kTail;
  EntityId& slot = neg.corrupted_side == Side::kHead ? neg.corrupted.head
                                                     : neg.corrupted.tail;
  // Draw from the other |E| - 1 entities by skipping the original id.
  auto pick = static_cast<EntityId>(rng.UniformInt(num_entities - 1));
  if (pick >= slot) ++pick;
  slot = pick;
  return neg;
}

std::vector<double> SelfAdversarialWeights(const EmbeddingModel& model,
                                           std::span<const Triplet> negatives,
                                           double temperature) {
  if (!(temperature >= 0.0)) {
    throw DomainError("self-adversarial temperature must be >= 0");
  }
  if (negatives.empty()) return {};
  std::vector<double> logits(negatives.size());
  for (size_t i = 0; i < negatives.size(); ++i) {
    logits[i] = temperature * Score(model, negatives[i]);
  }
  return Softmax(logits, 1.0);
}

GumbelSample GumbelSoftmaxWithNoise(std::span<const double> logits,
                                    std::span<const double> noise, double tau) {
  if (!(tau > 0.0)) {
    throw DomainError("gumbel-softmax: tau must be positive");
  }
  if (noise.size() != logits.size()) {
    throw ShapeError("gumbel-softmax: noise length mismatch");
  }
  std::vector<double> perturbed(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) perturbed[i] = logits[i] + noise[i];
  return {Softmax(perturbed, tau), std::vector<double>(noise.begin(), noise.end())};
}

GumbelSample GumbelSoftmaxSample(std::span<const double> logits, double tau,
                                 Rng& rng) {
  if (!(tau > 0.0)) {
    throw DomainError("gumbel-softmax: tau must be positive");
  }
  const std::vector<double> noise = GumbelNoise(logits.size(), rng);
  return GumbelSoftmaxWithNoise(logits, noise, tau);
}

size_t ArgMax(std::span<const double> values) {
  return static_cast<size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
}

GeneratorParams GeneratorParams::Initialized(size_t num_entities,
                                             size_t num_relations,
                                             const GeneratorConfig& config,
                                             Rng& rng) {
  GeneratorParams gen;
  gen.entities = DenseMatrix(num_entities, config.dim);
  gen.relations = DenseMatrix(num_relations, config.dim);
  gen.filters =
      FilterBank(config.filters, config.kernel_rows, config.kernel_cols);
  gen.tau = config.tau;
  gen.Validate();
  gen.projection = DenseMatrix(gen.feature_size(), num_entities);

  const double emb_bound = 6.0 / std::sqrt(static_cast<double>(config.dim));
  FillUniform(gen.entities.values(), emb_bound, rng);
  FillUniform(gen.relations.values(), emb_bound, rng);
  const size_t taps = config.kernel_rows * config.kernel_cols;
  FillUniform(gen.filters.weights, GlorotBound(taps, taps * config.filters),
              rng);
  FillUniform(gen.projection.values(),
              GlorotBound(gen.feature_size(), num_entities), rng);
  return gen;
}

void GeneratorParams::Validate() const {
  if (entities.cols() == 0 || relations.cols() != entities.cols()) {
    throw ConfigError("generator: entity and relation tables need equal dim");
  }
  if (filters.count == 0 || filters.kernel_rows == 0 ||
      filters.kernel_rows > 2 || filters.kernel_cols == 0 ||
      filters.kernel_cols > entities.cols()) {
    throw ConfigError("generator: kernel " +
                      std::to_string(filters.kernel_rows) + "x" +
                      std::to_string(filters.kernel_cols) +
                      " does not fit the 2x" +
                      std::to_string(entities.cols()) + " input");
  }
  if (!(tau > 0.0)) throw ConfigError("generator: tau must be positive");
  if (projection.size() != 0 && (projection.rows() != feature_size() ||
                                 projection.cols() != entities.rows())) {
    throw ConfigError("generator: projection must be " +
                      std::to_string(feature_size()) + "x" +
                      std::to_string(entities.rows()));
  }
}

GeneratorTrace RunGenerator(const GeneratorParams& gen, const Triplet& positive,
                            Side corrupted_side, Rng& rng,
                            std::span<const double> frozen_noise) {
  if (positive.head >= gen.entities.rows() ||
      positive.tail >= gen.entities.rows() ||
      positive.relation >= gen.relations.rows()) {
    throw LookupError("generator: triplet ids out of range");
  }
  GeneratorTrace trace;
  trace.positive = positive;
  trace.corrupted_side = corrupted_side;
  trace.given_entity =
      corrupted_side == Side::kTail ? positive.head : positive.tail;

  const size_t d = gen.dim();
  trace.input = DenseMatrix(2, d);
  const auto ent = gen.entities.row(trace.given_entity);
  const auto rel = gen.relations.row(positive.relation);
  const auto first = corrupted_side == Side::kTail ? ent : rel;
  const auto second = corrupted_side == Side::kTail ? rel : ent;
  std::copy(first.begin(), first.end(), trace.input.row(0).begin());
  std::copy(second.begin(), second.end(), trace.input.row(1).begin());

  trace.maps = Conv2dForward(trace.input, gen.filters);
  if (trace.maps.values.size() != gen.projection.rows()) {
    throw ConfigError("generator: feature size " +
                      std::to_string(trace.maps.values.size()) +
                      " does not match projection rows " +
                      std::to_string(gen.projection.rows()));
  }
  trace.logits = LinearForward(
      trace.maps.values, gen.projection,
      std::vector<double>(gen.projection.cols(), 0.0));
  trace.sample = frozen_noise.empty()
                     ? GumbelSoftmaxSample(trace.logits, gen.tau, rng)
                     : GumbelSoftmaxWithNoise(trace.logits, frozen_noise, gen.tau);
  return trace;
}

NegativeSample ToNegativeSample(const GeneratorTrace& trace) {
  NegativeSample neg;
  neg.corrupted = trace.positive;
  neg.corrupted_side = trace.corrupted_side;
  const auto id = static_cast<EntityId>(ArgMax(trace.sample.probs));
  if (trace.corrupted_side == Side::kTail) {
    neg.corrupted.tail = id;
  } else {
    neg.corrupted.head = id;
  }
  neg.soft_onehot = trace.sample.probs;
  return neg;
}

NegativeSample GeneratorForward(const GeneratorParams& gen,
                                const Triplet& positive, Side corrupted_side,
                                Rng& rng) {
  return ToNegativeSample(RunGenerator(gen, positive, corrupted_side, rng));
}

void RowGradients::Add(size_t row, std::span<const double> values,
                       double scale) {
  auto dst = grad_.row(row);
  for (size_t j = 0; j < values.size(); ++j) dst[j] += scale * values[j];
  touched_[row] = 1;
}

std::span<double> RowGradients::Mutable(size_t row) {
  touched_[row] = 1;
  return grad_.row(row);
}

std::vector<size_t> RowGradients::TouchedRows() const {
  std::vector<size_t> rows;
  for (size_t i = 0; i < touched_.size(); ++i) {
    if (touched_[i]) rows.push_back(i);
  }
  return rows;
}

void RowGradients::Clear() {
  for (size_t i = 0; i < touched_.size(); ++i) {
    if (!touched_[i]) continue;
    auto r = grad_.row(i);
    std::fill(r.begin(), r.end(), 0.0);
    touched_[i] = 0;
  }
}

GeneratorGradients::GeneratorGradients(const GeneratorParams& gen)
    : entities(gen.entities.rows(), gen.entities.cols()),
      relations(gen.relations.rows(), gen.relations.cols()),
      filters(gen.filters.count, gen.filters.kernel_rows,
              gen.filters.kernel_cols),
      projection(gen.projection.rows(), gen.projection.cols()) {}

void GeneratorGradients::Clear() {
  entities.Clear();
  relations.Clear();
  std::fill(filters.weights.begin(), filters.weights.end(), 0.0);
  auto p = projection.values();
  std::fill(p.begin(), p.end(), 0.0);
}

void BackpropGenerator(const GeneratorParams& gen, const GeneratorTrace& trace,
                       std::span<const double> grad_probs, double scale,
                       GeneratorGradients& grads) {
  std::vector<double> grad_logits =
      SoftmaxBackward(trace.sample.probs, grad_probs, gen.tau);
  for (double& g : grad_logits) g *= scale;

  std::vector<double> bias_sink(gen.projection.cols(), 0.0);
  const std::vector<double> grad_features =
      LinearBackward(trace.maps.values, gen.projection, grad_logits,
                     grads.projection, bias_sink);

  FeatureMaps upstream = trace.maps;
  upstream.values = grad_features;
  const Conv2dGrads conv = Conv2dBackward(trace.input, gen.filters, upstream);
  for (size_t i = 0; i < conv.filters.weights.size(); ++i) {
    grads.filters.weights[i] += conv.filters.weights[i];
  }
  const bool tail_side = trace.corrupted_side == Side::kTail;
  grads.entities.Add(trace.given_entity, conv.input.row(tail_side ? 0 : 1));
  grads.relations.Add(trace.positive.relation,
                      conv.input.row(tail_side ? 1 : 0));
}

DecoderParams DecoderParams::Zero(size_t num_entities, size_t num_relations,
                                  size_t hidden) {
  DecoderParams dec;
  dec.num_entities = num_entities;
  dec.num_relations = num_relations;
  dec.w1 = DenseMatrix(num_entities, hidden);
  dec.b1.assign(hidden, 0.0);
  dec.w2 = DenseMatrix(hidden, num_entities + num_relations);
  dec.b2.assign(num_entities + num_relations, 0.0);
  return dec;
}

DecoderParams DecoderParams::Initialized(size_t num_entities,
                                         size_t num_relations, size_t hidden,
                                         Rng& rng) {
  DecoderParams dec = Zero(num_entities, num_relations, hidden);
  FillUniform(dec.w1.values(), GlorotBound(num_entities, hidden), rng);
  FillUniform(dec.w2.values(),
              GlorotBound(hidden, num_entities + num_relations), rng);
  return dec;
}

DecoderOutput DecoderForward(const DecoderParams& dec,
                             std::span<const double> soft_onehot) {
  if (soft_onehot.size() != dec.num_entities) {
    throw ConfigError("decoder: input length " +
                      std::to_string(soft_onehot.size()) + ", expected " +
                      std::to_string(dec.num_entities));
  }
  DecoderOutput out;
  out.hidden = LinearForward(soft_onehot, dec.w1, dec.b1);
  const std::vector<double> full = LinearForward(out.hidden, dec.w2, dec.b2);
  out.entity.assign(full.begin(), full.begin() + dec.num_entities);
  out.relation.assign(full.begin() + dec.num_entities, full.end());
  return out;
}

std::vector<double> ReconstructionTarget(EntityId given_entity,
                                         RelationId relation,
                                         size_t num_entities,
                                         size_t num_relations) {
  std::vector<double> x(num_entities + num_relations, 0.0);
  x[given_entity] = 1.0;
  x[num_entities + relation] = 1.0;
  return x;
}

double ReconstructionLoss(const DecoderOutput& out,
                          std::span<const double> target) {
  if (target.size() != out.entity.size() + out.relation.size()) {
    throw ShapeError("reconstruction target length mismatch");
  }
  double loss = 0.0;
  for (size_t i = 0; i < out.entity.size(); ++i) {
    const double diff = target[i] - out.entity[i];
    loss += diff * diff;
  }
  for (size_t i = 0; i < out.relation.size(); ++i) {
    const double diff = target[out.entity.size() + i] - out.relation[i];
    loss += diff * diff;
  }
  return loss;
}

DecoderGradients::DecoderGradients(const DecoderParams& dec)
    : w1(dec.w1.rows(), dec.w1.cols()),
      b1(dec.b1.size(), 0.0),
      w2(dec.w2.rows(), dec.w2.cols()),
      b2(dec.b2.size(), 0.0) {}

void DecoderGradients::Clear() {
  for (auto* m : {&w1, &w2}) {
    auto v = m->values();
    std::fill(v.begin(), v.end(), 0.0);
  }
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(b2.begin(), b2.end(), 0.0);
}

std::vector<double> BackpropDecoder(const DecoderParams& dec,
                                    std::span<const double> soft_onehot,
                                    const DecoderOutput& out,
                                    std::span<const double> target,
                                    double scale, DecoderGradients& grads) {
  const size_t n_ent = out.entity.size();
  std::vector<double> grad_out(target.size());
  for (size_t i = 0; i < n_ent; ++i) {
    grad_out[i] = -2.0 * scale * (target[i] - out.entity[i]);
  }
  for (size_t i = 0; i < out.relation.size(); ++i) {
    grad_out[n_ent + i] = -2.0 * scale * (target[n_ent + i] - out.relation[i]);
  }
  const std::vector<double> grad_hidden =
      LinearBackward(out.hidden, dec.w2, grad_out, grads.w2, grads.b2);
  return LinearBackward(soft_onehot, dec.w1, grad_hidden, grads.w1, grads.b1);
}

std::vector<double> SoftEmbeddingLookup(const DenseMatrix& table,
                                        std::span<const double> soft_onehot) {
  if (soft_onehot.size() != table.rows()) {
    throw ShapeError("soft lookup: weights length " +
                     std::to_string(soft_onehot.size()) + " vs " +
                     std::to_string(table.rows()) + " rows");
  }
  std::vector<double> out(table.cols(), 0.0);
  for (size_t i = 0; i < table.rows(); ++i) {
    const double w = soft_onehot[i];
    if (w == 0.0) continue;
    const auto row = table.row(i);
    for (size_t j = 0; j < out.size(); ++j) out[j] += w * row[j];
  }
  return out;
}

std::vector<double> SoftEmbeddingLookupBackward(
    const DenseMatrix& table, std::span<const double> soft_onehot,
    std::span<const double> upstream, RowGradients* table_grads) {
  if (soft_onehot.size() != table.rows() || upstream.size() != table.cols()) {
    throw ShapeError("soft lookup backward: shape mismatch");
  }
  std::vector<double> grad(table.rows(), 0.0);
  for (size_t i = 0; i < table.rows(); ++i) {
    const auto row = table.row(i);
    double acc = 0.0;
    for (size_t j = 0; j < upstream.size(); ++j) acc += row[j] * upstream[j];
    grad[i] = acc;
    if (table_grads != nullptr && soft_onehot[i] != 0.0) {
      table_grads->Add(i, upstream, soft_onehot[i]);
    }
  }
  return grad;
}

}  // namespace ddiadv
