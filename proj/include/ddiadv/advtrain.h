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

#ifndef DDIADV_ADVTRAIN_H_
#define DDIADV_ADVTRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddiadv/kgstore.h"
#include "ddiadv/negsamplers.h"
#include "ddiadv/numkit.h"
#include "ddiadv/rng.h"
#include "ddiadv/scorers.h"

namespace ddiadv {

enum class ClipScope { kEmbeddings, kNone };

struct TrainConfig {
  double alpha = 0.001;  // generator / autoencoder learning rate
  double beta = 0.05;    // discriminator learning rate
  size_t dim = 16;
  size_t batch_size = 64;
  size_t n_dis = 1;
  size_t epochs = 10;
  double clip = 1.0;
  double tau = 0.5;
  double gamma = 0.0;            // margin, baselines only
  double adv_temperature = 1.0;  // self-adversarial sampling temperature
  size_t negatives = 1;          // negatives per positive, baselines only
  ScorerTag scorer = ScorerTag::kComplEx;
  DistanceNorm transe_norm = DistanceNorm::kL2;
  SamplerTag sampler = SamplerTag::kAae;
  ClipScope clip_scope = ClipScope::kEmbeddings;
  size_t filters = 8;
  size_t kernel_rows = 2;
  size_t kernel_cols = 3;
  size_t decoder_hidden = 0;  // 0 means 2 * dim
  uint64_t seed = 0;

  // Throws ConfigError naming the first offending field.
  void Validate() const;

  ScorerKind scorer_kind() const { return {scorer, transe_norm, dim}; }
  GeneratorConfig generator_config() const {
    return {dim, filters, kernel_rows, kernel_cols, tau};
  }
  size_t resolved_decoder_hidden() const {
    return decoder_hidden == 0 ? 2 * dim : decoder_hidden;
  }
};

// Named configurations. The deepddi-* / decagon-* presets carry the tuned
// values reported for the original datasets; synthetic-* presets are sized
// for desk runs.
std::optional<TrainConfig> FindPreset(std::string_view name);
std::vector<std::string> PresetNames();

struct EpochReport {
  size_t epoch = 0;
  double loss_autoencoder = 0.0;
  double loss_discriminator = 0.0;
  double loss_generator = 0.0;
  double seconds = 0.0;
  double entity_norm = 0.0;
  double relation_norm = 0.0;
  double generator_norm = 0.0;
};

std::string EpochCsvHeader();
std::string EpochCsvRow(const EpochReport& report);

struct TrainResult {
  EmbeddingModel model;
  std::vector<EpochReport> reports;
};

using EpochCallback =
    std::function<void(const EpochReport&, const EmbeddingModel&)>;

// Side and Gumbel noise for one sample of one phase. Fixing these makes every
// phase loss a deterministic function of the parameters.
struct SampleDraw {
  Side side = Side::kTail;
  std::vector<double> noise;
};

// State of the three-phase adversarial loop: generator (theta), decoder
// (eta), discriminator embeddings (phi) and their Adagrad accumulators.
class AdversarialTrainer {
 public:
  AdversarialTrainer(const TrainConfig& config, size_t num_entities,
                     size_t num_relations);

  std::vector<SampleDraw> Draw(std::span<const Triplet> batch);

  // Mean batch losses at fixed draws; no parameter changes.
  double AutoencoderLoss(std::span<const Triplet> batch,
                         std::span<const SampleDraw> draws) const;
  double DiscriminatorLoss(std::span<const Triplet> batch,
                           std::span<const SampleDraw> draws) const;
  double GeneratorLoss(std::span<const Triplet> batch,
                       std::span<const SampleDraw> draws) const;

  // Gradients of the mean losses above; each returns the loss.
  double AutoencoderGradients(std::span<const Triplet> batch,
                              std::span<const SampleDraw> draws,
                              GeneratorGradients& gen_grads,
                              DecoderGradients& dec_grads) const;
  double DiscriminatorGradients(std::span<const Triplet> batch,
                                std::span<const SampleDraw> draws,
                                RowGradients& entity_grads,
                                RowGradients& relation_grads) const;
  double GeneratorGradientsFor(std::span<const Triplet> batch,
                               std::span<const SampleDraw> draws,
                               GeneratorGradients& gen_grads) const;

  // One Adagrad step each; return the mean loss before the step.
  double AutoencoderStep(std::span<const Triplet> batch,
                         std::span<const SampleDraw> draws);
  double DiscriminatorStep(std::span<const Triplet> batch,
                           std::span<const SampleDraw> draws);
  double GeneratorStep(std::span<const Triplet> batch,
                       std::span<const SampleDraw> draws);

  // Draw + Step.
  double UpdateAutoencoder(std::span<const Triplet> batch);
  double UpdateDiscriminator(std::span<const Triplet> batch);
  double UpdateGenerator(std::span<const Triplet> batch);

  // One epoch over `train` in shuffled mini-batches.
  EpochReport RunEpoch(std::span<const Triplet> train, size_t epoch);

  const TrainConfig& config() const { return config_; }
  const EmbeddingModel& model() const { return model_; }
  EmbeddingModel& mutable_model() { return model_; }
  const GeneratorParams& generator() const { return gen_; }
  GeneratorParams& mutable_generator() { return gen_; }
  const DecoderParams& decoder() const { return dec_; }
  DecoderParams& mutable_decoder() { return dec_; }

  // Largest |phi| seen right after any discriminator step so far, and the
  // number of such steps.
  double max_abs_after_clip() const { return max_abs_after_clip_; }
  size_t discriminator_steps() const { return discriminator_steps_; }

 private:
  void ApplyGenerator(const GeneratorGradients& grads);
  void ApplyDecoder(const DecoderGradients& grads);
  // Soft-lookup discriminator score of a traced negative; optionally
  // accumulates scale * gradients.
  double NegativeScore(const GeneratorTrace& trace, double scale,
                       RowGradients* entity_grads,
                       RowGradients* relation_grads,
                       std::vector<double>* grad_probs) const;

  TrainConfig config_;
  EmbeddingModel model_;
  GeneratorParams gen_;
  DecoderParams dec_;
  Rng shuffle_rng_;
  Rng sample_rng_;

  AdagradState gen_entities_opt_, gen_relations_opt_, gen_filters_opt_,
      gen_projection_opt_;
  AdagradState dec_w1_opt_, dec_b1_opt_, dec_w2_opt_, dec_b2_opt_;
  AdagradState disc_entities_opt_, disc_relations_opt_;

  GeneratorGradients gen_grads_;
  DecoderGradients dec_grads_;
  RowGradients disc_entity_grads_;
  RowGradients disc_relation_grads_;

  double max_abs_after_clip_ = 0.0;
  size_t discriminator_steps_ = 0;
};

// Sigmoid-margin negative-sampling training with uniform or
// self-adversarial weights over uniformly corrupted negatives.
class BaselineTrainer {
 public:
  BaselineTrainer(const TrainConfig& config, size_t num_entities,
                  size_t num_relations);

  // Negatives for each positive, `negatives` per positive, row-major.
  std::vector<Triplet> DrawNegatives(std::span<const Triplet> batch);

  // Loss weights for one positive's negatives.
  std::vector<double> NegativeWeights(std::span<const Triplet> negatives) const;

  double Loss(std::span<const Triplet> batch,
              std::span<const Triplet> negatives) const;
  double Step(std::span<const Triplet> batch,
              std::span<const Triplet> negatives);

  EpochReport RunEpoch(std::span<const Triplet> train, size_t epoch);

  const EmbeddingModel& model() const { return model_; }
  EmbeddingModel& mutable_model() { return model_; }

 private:
  TrainConfig config_;
  EmbeddingModel model_;
  Rng shuffle_rng_;
  Rng sample_rng_;
  AdagradState entities_opt_, relations_opt_;
  RowGradients entity_grads_, relation_grads_;
};

// -log(sigmoid(z)), stable for large |z|.
double NegLogSigmoid(double z);

// Full adversarial training; returns the discriminator's embeddings.
TrainResult Train(const TrainConfig& config, const DatasetSplit& split,
                  size_t num_entities, size_t num_relations,
                  const EpochCallback& on_epoch = {});

// Uniform or self-adversarial baseline training.
TrainResult TrainBaseline(const TrainConfig& config, const DatasetSplit& split,
                          size_t num_entities, size_t num_relations,
                          const EpochCallback& on_epoch = {});

// Dispatches on config.sampler.
TrainResult TrainAny(const TrainConfig& config, const DatasetSplit& split,
                     size_t num_entities, size_t num_relations,
                     const EpochCallback& on_epoch = {});

}  // namespace ddiadv

#endif  // DDIADV_ADVTRAIN_H_
