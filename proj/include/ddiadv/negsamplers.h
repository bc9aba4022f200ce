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

#ifndef DDIADV_NEGSAMPLERS_H_
#define DDIADV_NEGSAMPLERS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ddiadv/kgstore.h"
#include "ddiadv/numkit.h"
#include "ddiadv/rng.h"
#include "ddiadv/scorers.h"

namespace ddiadv {

enum class SamplerTag { kUniform, kSelfAdversarial, kAae };

std::string_view SamplerName(SamplerTag tag);
std::optional<SamplerTag> ParseSamplerTag(std::string_view name);

struct NegativeSample {
  Triplet corrupted;
  Side corrupted_side = Side::kTail;
  // Relaxed one-hot over entities; empty unless produced by the generator.
  std::vector<double> soft_onehot;
};

// Replaces head or tail (probability 1/2 each) with an entity drawn
// uniformly from the others. Throws SamplerError when num_entities < 2.
NegativeSample UniformCorrupt(const Triplet& positive, size_t num_entities,
                              Rng& rng);

// softmax(temperature * score) over the negatives' current scores. The
// result is a constant loss weighting; no gradient flows through it.
std::vector<double> SelfAdversarialWeights(const EmbeddingModel& model,
                                           std::span<const Triplet> negatives,
                                           double temperature);

struct GumbelSample {
  std::vector<double> probs;
  std::vector<double> noise;
};

// probs_i = exp((o_i + g_i) / tau) / sum_a exp((o_a + g_a) / tau).
GumbelSample GumbelSoftmaxSample(std::span<const double> logits, double tau,
                                 Rng& rng);
// Same with caller-supplied noise (the frozen-noise hook).
GumbelSample GumbelSoftmaxWithNoise(std::span<const double> logits,
                                    std::span<const double> noise, double tau);

size_t ArgMax(std::span<const double> values);

struct GeneratorConfig {
  size_t dim = 16;
  size_t filters = 8;
  size_t kernel_rows = 2;
  size_t kernel_cols = 3;
  double tau = 0.5;
};

// Encoder parameters (theta). The generator keeps its own entity and
// relation tables, separate from the discriminator's.
struct GeneratorParams {
  DenseMatrix entities;   // |E| x d
  DenseMatrix relations;  // |R| x d
  FilterBank filters;
  DenseMatrix projection;  // (b*m*n) x |E|
  double tau = 0.5;

  static GeneratorParams Initialized(size_t num_entities, size_t num_relations,
                                     const GeneratorConfig& config, Rng& rng);

  size_t dim() const { return entities.cols(); }
  size_t map_rows() const { return 2 - filters.kernel_rows + 1; }
  size_t map_cols() const { return dim() - filters.kernel_cols + 1; }
  size_t feature_size() const { return filters.count * map_rows() * map_cols(); }

  // Throws ConfigError when the pieces do not fit together.
  void Validate() const;
};

// Intermediate values of one generator pass, kept for backprop.
struct GeneratorTrace {
  Triplet positive;
  Side corrupted_side = Side::kTail;
  EntityId given_entity = 0;
  DenseMatrix input;  // 2 x d
  FeatureMaps maps;
  std::vector<double> logits;
  GumbelSample sample;
};

// Builds the 2 x d input from the two given elements: [head; relation] when
// the tail is generated, [relation; tail] when the head is generated. Then
// conv -> flatten -> projection -> Gumbel-Softmax. Pass `frozen_noise` to
// bypass the rng.
GeneratorTrace RunGenerator(const GeneratorParams& gen, const Triplet& positive,
                            Side corrupted_side, Rng& rng,
                            std::span<const double> frozen_noise = {});

// The corrupted triplet takes argmax of the relaxed one-hot.
NegativeSample ToNegativeSample(const GeneratorTrace& trace);

NegativeSample GeneratorForward(const GeneratorParams& gen,
                                const Triplet& positive, Side corrupted_side,
                                Rng& rng);

// Dense accumulator that remembers which rows were written.
class RowGradients {
 public:
  RowGradients() = default;
  RowGradients(size_t rows, size_t cols) : grad_(rows, cols), touched_(rows, 0) {}

  void Add(size_t row, std::span<const double> values, double scale = 1.0);
  std::span<double> Mutable(size_t row);
  std::span<const double> row(size_t r) const { return grad_.row(r); }
  const DenseMatrix& dense() const { return grad_; }
  std::vector<size_t> TouchedRows() const;
  void Clear();

 private:
  DenseMatrix grad_;
  std::vector<uint8_t> touched_;
};

struct GeneratorGradients {
  RowGradients entities;
  RowGradients relations;
  FilterBank filters;
  DenseMatrix projection;

  explicit GeneratorGradients(const GeneratorParams& gen);
  void Clear();
};

// Adds scale * dL/dtheta given dL/dprobs of one traced pass.
void BackpropGenerator(const GeneratorParams& gen, const GeneratorTrace& trace,
                       std::span<const double> grad_probs, double scale,
                       GeneratorGradients& grads);

// Decoder (eta): |E| -> hidden -> |E| + |R|, two linear layers.
struct DecoderParams {
  DenseMatrix w1;  // |E| x hidden
  std::vector<double> b1;
  DenseMatrix w2;  // hidden x (|E| + |R|)
  std::vector<double> b2;
  size_t num_entities = 0;
  size_t num_relations = 0;

  static DecoderParams Initialized(size_t num_entities, size_t num_relations,
                                   size_t hidden, Rng& rng);
  static DecoderParams Zero(size_t num_entities, size_t num_relations,
                            size_t hidden);
};

struct DecoderOutput {
  std::vector<double> hidden;
  std::vector<double> entity;    // |E|
  std::vector<double> relation;  // |R|
};

DecoderOutput DecoderForward(const DecoderParams& dec,
                             std::span<const double> soft_onehot);

// Concatenated one-hot of the generator's two inputs.
std::vector<double> ReconstructionTarget(EntityId given_entity,
                                         RelationId relation,
                                         size_t num_entities,
                                         size_t num_relations);

// ||target - [entity; relation]||^2
double ReconstructionLoss(const DecoderOutput& out,
                          std::span<const double> target);

struct DecoderGradients {
  DenseMatrix w1;
  std::vector<double> b1;
  DenseMatrix w2;
  std::vector<double> b2;

  explicit DecoderGradients(const DecoderParams& dec);
  void Clear();
};

// Backprop of scale * ReconstructionLoss. Accumulates into `grads` and
// returns dLoss/d(soft_onehot) (scaled).
std::vector<double> BackpropDecoder(const DecoderParams& dec,
                                    std::span<const double> soft_onehot,
                                    const DecoderOutput& out,
                                    std::span<const double> target,
                                    double scale, DecoderGradients& grads);

// soft_onehot^T * table, a convex combination of rows.
std::vector<double> SoftEmbeddingLookup(const DenseMatrix& table,
                                        std::span<const double> soft_onehot);

// Given dL/d(lookup), returns dL/d(soft_onehot) and, when table_grads is
// set, adds soft_onehot_i * upstream into every row i.
std::vector<double> SoftEmbeddingLookupBackward(
    const DenseMatrix& table, std::span<const double> soft_onehot,
    std::span<const double> upstream, RowGradients* table_grads);

}  // namespace ddiadv

#endif  // DDIADV_NEGSAMPLERS_H_
