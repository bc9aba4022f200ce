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

#include "ddiadv/advtrain.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>

#include "ddiadv/error.h"

namespace ddiadv {
namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double FrobeniusNorm(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc);
}

double MaxAbs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

void CheckFiniteLoss(double loss, const char* phase) {
  if (!std::isfinite(loss)) {
    throw TrainingError(std::string("non-finite ") + phase + " loss");
  }
}

void ApplyRows(DenseMatrix& params, const RowGradients& grads,
               AdagradState& state, double lr, std::string_view name) {
  const size_t cols = params.cols();
  for (size_t r : grads.TouchedRows()) {
    AdagradStep(params.row(r), grads.row(r), state, lr, name, r * cols);
  }
}

std::vector<std::vector<size_t>> ShuffledBatches(size_t n, size_t batch_size,
                                                 Rng& rng) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  rng.Shuffle(std::span<size_t>(order));
  std::vector<std::vector<size_t>> batches;
  for (size_t start = 0; start < n; start += batch_size) {
    const size_t end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

std::vector<Triplet> Gather(std::span<const Triplet> data,
                            const std::vector<size_t>& idx) {
  std::vector<Triplet> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(data[i]);
  return out;
}

// Root seed -> independent streams for init, shuffling and sampling.
struct Streams {
  Rng init;
  Rng shuffle;
  Rng sample;
};

Streams MakeStreams(uint64_t seed) {
  Rng root(seed);
  Rng init = root.Fork();
  Rng shuffle = root.Fork();
  Rng sample = root.Fork();
  return {init, shuffle, sample};
}

std::string WithContext(const Error& e, size_t epoch, size_t batch) {
  return std::string(e.what()) + " (epoch " + std::to_string(epoch) +
         ", batch " + std::to_string(batch) + ")";
}

}  // namespace

double NegLogSigmoid(double z) {
  return std::log1p(std::exp(-std::fabs(z))) + std::max(-z, 0.0);
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, const char* field, const char* rule) {
    if (!ok) throw ConfigError(std::string(field) + " must be " + rule);
  };
  require(alpha > 0 && std::isfinite(alpha), "alpha", "> 0");
  require(beta > 0 && std::isfinite(beta), "beta", "> 0");
  require(clip > 0 && std::isfinite(clip), "clip", "> 0");
  require(tau > 0 && std::isfinite(tau), "tau", "> 0");
  require(dim >= 1, "dim", ">= 1");
  require(batch_size >= 1, "batch_size", ">= 1");
  require(n_dis >= 1, "n_dis", ">= 1");
  require(negatives >= 1, "negatives", ">= 1");
  require(adv_temperature >= 0, "adv_temperature", ">= 0");
  require(std::isfinite(gamma), "gamma", "finite");
  require(filters >= 1, "filters", ">= 1");
  require(kernel_rows >= 1 && kernel_rows <= 2, "kernel_rows", "1 or 2");
  require(kernel_cols >= 1 && kernel_cols <= dim, "kernel_cols",
          "in [1, dim]");
}

std::optional<TrainConfig> FindPreset(std::string_view name) {
  auto paper = [](ScorerTag scorer, double alpha, double beta, size_t m,
                  size_t n_dis, size_t epochs) {
    TrainConfig c;
    c.scorer = scorer;
    c.sampler = SamplerTag::kAae;
    c.alpha = alpha;
    c.beta = beta;
    c.dim = 200;
    c.batch_size = m;
    c.n_dis = n_dis;
    c.epochs = epochs;
    return c;
  };
  static const std::map<std::string, TrainConfig, std::less<>> kPresets = [&] {
    std::map<std::string, TrainConfig, std::less<>> p;
    p["deepddi-complex"] = paper(ScorerTag::kComplEx, 0.001, 0.05, 512, 1, 300);
    p["deepddi-simple"] = paper(ScorerTag::kSimplE, 0.001, 0.1, 512, 1, 300);
    p["deepddi-rotate"] = paper(ScorerTag::kRotatE, 0.001, 0.5, 512, 2, 500);
    p["decagon-complex"] = paper(ScorerTag::kComplEx, 0.005, 0.5, 1024, 1, 1000);
    p["decagon-simple"] = paper(ScorerTag::kSimplE, 0.005, 0.5, 512, 2, 1000);
    p["decagon-rotate"] = paper(ScorerTag::kRotatE, 0.005, 0.5, 512, 5, 1000);

    TrainConfig aae;
    aae.scorer = ScorerTag::kComplEx;
    aae.sampler = SamplerTag::kAae;
    aae.dim = 16;
    aae.batch_size = 64;
    aae.alpha = 0.1;
    aae.beta = 0.03;
    aae.n_dis = 1;
    aae.epochs = 100;
    aae.clip = 0.5;
    aae.tau = 0.5;
    p["synthetic-aae"] = aae;

    TrainConfig uniform = aae;
    uniform.sampler = SamplerTag::kUniform;
    uniform.beta = 0.05;
    uniform.negatives = 1;
    p["synthetic-uniform"] = uniform;

    TrainConfig selfadv = uniform;
    selfadv.sampler = SamplerTag::kSelfAdversarial;
    selfadv.negatives = 8;
    p["synthetic-self-adversarial"] = selfadv;
    return p;
  }();
  auto it = kPresets.find(name);
  if (it == kPresets.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> PresetNames() {
  return {"deepddi-complex",   "deepddi-simple",
          "deepddi-rotate",    "decagon-complex",
          "decagon-simple",    "decagon-rotate",
          "synthetic-aae",     "synthetic-uniform",
          "synthetic-self-adversarial"};
}

std::string EpochCsvHeader() { return "epoch,L_GA,L_D,L_G,seconds\n"; }

std::string EpochCsvRow(const EpochReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.6f\n", r.epoch,
                r.loss_autoencoder, r.loss_discriminator, r.loss_generator,
                r.seconds);
  return buf;
}

AdversarialTrainer::AdversarialTrainer(const TrainConfig& config,
                                       size_t num_entities,
                                       size_t num_relations)
    : config_(config),
      shuffle_rng_(0),
      sample_rng_(0),
      gen_grads_(GeneratorParams{}),
      dec_grads_(DecoderParams{}) {
  config_.Validate();
  if (num_entities < 2 || num_relations < 1) {
    throw ConfigError("training needs at least 2 entities and 1 relation");
  }
  Streams streams = MakeStreams(config_.seed);
  model_ = EmbeddingModel::Initialized(config_.scorer_kind(), num_entities,
                                       num_relations, streams.init);
  gen_ = GeneratorParams::Initialized(num_entities, num_relations,
                                      config_.generator_config(), streams.init);
  dec_ = DecoderParams::Initialized(num_entities, num_relations,
                                    config_.resolved_decoder_hidden(),
                                    streams.init);
  shuffle_rng_ = streams.shuffle;
  sample_rng_ = streams.sample;

  gen_entities_opt_ = AdagradState(gen_.entities.size());
  gen_relations_opt_ = AdagradState(gen_.relations.size());
  gen_filters_opt_ = AdagradState(gen_.filters.weights.size());
  gen_projection_opt_ = AdagradState(gen_.projection.size());
  dec_w1_opt_ = AdagradState(dec_.w1.size());
  dec_b1_opt_ = AdagradState(dec_.b1.size());
  dec_w2_opt_ = AdagradState(dec_.w2.size());
  dec_b2_opt_ = AdagradState(dec_.b2.size());
  disc_entities_opt_ = AdagradState(model_.entities().size());
  disc_relations_opt_ = AdagradState(model_.relations().size());

  gen_grads_ = GeneratorGradients(gen_);
  dec_grads_ = DecoderGradients(dec_);
  disc_entity_grads_ =
      RowGradients(model_.entities().rows(), model_.entities().cols());
  disc_relation_grads_ =
      RowGradients(model_.relations().rows(), model_.relations().cols());
}

std::vector<SampleDraw> AdversarialTrainer::Draw(
    std::span<const Triplet> batch) {
  std::vector<SampleDraw> draws(batch.size());
  for (auto& d : draws) {
    d.side = sample_rng_.Bernoulli(0.5) ? Side::kHead : Side::kTail;
    d.noise = GumbelNoise(gen_.entities.rows(), sample_rng_);
  }
  return draws;
}

double AdversarialTrainer::NegativeScore(const GeneratorTrace& trace,
                                         double scale,
                                         RowGradients* entity_grads,
                                         RowGradients* relation_grads,
                                         std::vector<double>* grad_probs) const {
  const auto& kind = model_.kind();
  const DenseMatrix& ent = model_.entities();
  const auto& y = trace.sample.probs;
  const std::vector<double> soft = SoftEmbeddingLookup(ent, y);
  const auto given = ent.row(trace.given_entity);
  const auto rel = model_.relations().row(trace.positive.relation);
  const bool tail_side = trace.corrupted_side == Side::kTail;
  const double score = tail_side ? ScoreRows(kind, given, rel, soft)
                                 : ScoreRows(kind, soft, rel, given);
  if (entity_grads == nullptr && grad_probs == nullptr) return score;

  std::vector<double> g_given(given.size(), 0.0);
  std::vector<double> g_rel(rel.size(), 0.0);
  std::vector<double> g_soft(soft.size(), 0.0);
  if (tail_side) {
    AccumulateScoreGradients(kind, given, rel, soft, scale, g_given, g_rel,
                             g_soft);
  } else {
    AccumulateScoreGradients(kind, soft, rel, given, scale, g_soft, g_rel,
                             g_given);
  }
  if (entity_grads != nullptr) {
    entity_grads->Add(trace.given_entity, g_given);
    relation_grads->Add(trace.positive.relation, g_rel);
  }
  std::vector<double> dy =
      SoftEmbeddingLookupBackward(ent, y, g_soft, entity_grads);
  if (grad_probs != nullptr) *grad_probs = std::move(dy);
  return score;
}

double AdversarialTrainer::AutoencoderGradients(
    std::span<const Triplet> batch, std::span<const SampleDraw> draws,
    GeneratorGradients& gen_grads, DecoderGradients& dec_grads) const {
  Rng unused(0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const GeneratorTrace trace =
        RunGenerator(gen_, batch[i], draws[i].side, unused, draws[i].noise);
    const DecoderOutput out = DecoderForward(dec_, trace.sample.probs);
    const std::vector<double> target =
        ReconstructionTarget(trace.given_entity, batch[i].relation,
                             dec_.num_entities, dec_.num_relations);
    total += ReconstructionLoss(out, target);
    const std::vector<double> dy = BackpropDecoder(
        dec_, trace.sample.probs, out, target, scale, dec_grads);
    BackpropGenerator(gen_, trace, dy, 1.0, gen_grads);
  }
  return total * scale;
}

double AdversarialTrainer::AutoencoderLoss(
    std::span<const Triplet> batch, std::span<const SampleDraw> draws) const {
  Rng unused(0);
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const GeneratorTrace trace =
        RunGenerator(gen_, batch[i], draws[i].side, unused, draws[i].noise);
    const DecoderOutput out = DecoderForward(dec_, trace.sample.probs);
    total += ReconstructionLoss(
        out, ReconstructionTarget(trace.given_entity, batch[i].relation,
                                  dec_.num_entities, dec_.num_relations));
  }
  return total / static_cast<double>(batch.size());
}

double AdversarialTrainer::DiscriminatorGradients(
    std::span<const Triplet> batch, std::span<const SampleDraw> draws,
    RowGradients& entity_grads, RowGradients& relation_grads) const {
  Rng unused(0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  const auto& kind = model_.kind();
  const DenseMatrix& ent = model_.entities();
  const DenseMatrix& rel = model_.relations();
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Triplet& x = batch[i];
    const double real = Score(model_, x);
    // Accumulate into scratch first: head and tail may share a row.
    std::vector<double> gh(ent.cols(), 0.0), gr(rel.cols(), 0.0),
        gt(ent.cols(), 0.0);
    AccumulateScoreGradients(kind, ent.row(x.head), rel.row(x.relation),
                             ent.row(x.tail), -scale, gh, gr, gt);
    entity_grads.Add(x.head, gh);
    entity_grads.Add(x.tail, gt);
    relation_grads.Add(x.relation, gr);

    const GeneratorTrace trace =
        RunGenerator(gen_, x, draws[i].side, unused, draws[i].noise);
    const double fake =
        NegativeScore(trace, scale, &entity_grads, &relation_grads, nullptr);
    total += -(real - fake);
  }
  return total * scale;
}

double AdversarialTrainer::DiscriminatorLoss(
    std::span<const Triplet> batch, std::span<const SampleDraw> draws) const {
  Rng unused(0);
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const GeneratorTrace trace =
        RunGenerator(gen_, batch[i], draws[i].side, unused, draws[i].noise);
    total += -(Score(model_, batch[i]) -
               NegativeScore(trace, 0.0, nullptr, nullptr, nullptr));
  }
  return total / static_cast<double>(batch.size());
}

double AdversarialTrainer::GeneratorGradientsFor(
    std::span<const Triplet> batch, std::span<const SampleDraw> draws,
    GeneratorGradients& gen_grads) const {
  Rng unused(0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  std::vector<double> dy;
  for (size_t i = 0; i < batch.size(); ++i) {
    const GeneratorTrace trace =
        RunGenerator(gen_, batch[i], draws[i].side, unused, draws[i].noise);
    total += -NegativeScore(trace, -scale, nullptr, nullptr, &dy);
    BackpropGenerator(gen_, trace, dy, 1.0, gen_grads);
  }
  return total * scale;
}

double AdversarialTrainer::GeneratorLoss(
    std::span<const Triplet> batch, std::span<const SampleDraw> draws) const {
  Rng unused(0);
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const GeneratorTrace trace =
        RunGenerator(gen_, batch[i], draws[i].side, unused, draws[i].noise);
    total += -NegativeScore(trace, 0.0, nullptr, nullptr, nullptr);
  }
  return total / static_cast<double>(batch.size());
}

void AdversarialTrainer::ApplyGenerator(const GeneratorGradients& grads) {
  const double lr = config_.alpha;
  ApplyRows(gen_.entities, grads.entities, gen_entities_opt_, lr,
            "generator.entities");
  ApplyRows(gen_.relations, grads.relations, gen_relations_opt_, lr,
            "generator.relations");
  AdagradStep(gen_.filters.weights, grads.filters.weights, gen_filters_opt_,
              lr, "generator.filters");
  AdagradStep(gen_.projection.values(), grads.projection.values(),
              gen_projection_opt_, lr, "generator.projection");
}

void AdversarialTrainer::ApplyDecoder(const DecoderGradients& grads) {
  const double lr = config_.alpha;
  AdagradStep(dec_.w1.values(), grads.w1.values(), dec_w1_opt_, lr,
              "decoder.w1");
  AdagradStep(dec_.b1, grads.b1, dec_b1_opt_, lr, "decoder.b1");
  AdagradStep(dec_.w2.values(), grads.w2.values(), dec_w2_opt_, lr,
              "decoder.w2");
  AdagradStep(dec_.b2, grads.b2, dec_b2_opt_, lr, "decoder.b2");
}

double AdversarialTrainer::AutoencoderStep(std::span<const Triplet> batch,
                                           std::span<const SampleDraw> draws) {
  if (batch.empty()) throw TrainingError("autoencoder update: empty batch");
  gen_grads_.Clear();
  dec_grads_.Clear();
  const double loss = AutoencoderGradients(batch, draws, gen_grads_, dec_grads_);
  CheckFiniteLoss(loss, "autoencoder");
  ApplyGenerator(gen_grads_);
  ApplyDecoder(dec_grads_);
  return loss;
}

double AdversarialTrainer::DiscriminatorStep(std::span<const Triplet> batch,
                                             std::span<const SampleDraw> draws) {
  if (batch.empty()) throw TrainingError("discriminator update: empty batch");
  disc_entity_grads_.Clear();
  disc_relation_grads_.Clear();
  const double loss = DiscriminatorGradients(batch, draws, disc_entity_grads_,
                                             disc_relation_grads_);
  CheckFiniteLoss(loss, "discriminator");
  ApplyRows(model_.entities(), disc_entity_grads_, disc_entities_opt_,
            config_.beta, "discriminator.entities");
  ApplyRows(model_.relations(), disc_relation_grads_, disc_relations_opt_,
            config_.beta, "discriminator.relations");
  if (config_.clip_scope == ClipScope::kEmbeddings) {
    ClipParams(model_.entities().values(), config_.clip);
    ClipParams(model_.relations().values(), config_.clip);
  }
  max_abs_after_clip_ =
      std::max({max_abs_after_clip_, MaxAbs(model_.entities().values()),
                MaxAbs(model_.relations().values())});
  ++discriminator_steps_;
  return loss;
}

double AdversarialTrainer::GeneratorStep(std::span<const Triplet> batch,
                                         std::span<const SampleDraw> draws) {
  if (batch.empty()) throw TrainingError("generator update: empty batch");
  gen_grads_.Clear();
  const double loss = GeneratorGradientsFor(batch, draws, gen_grads_);
  CheckFiniteLoss(loss, "generator");
  ApplyGenerator(gen_grads_);
  return loss;
}

double AdversarialTrainer::UpdateAutoencoder(std::span<const Triplet> batch) {
  const auto draws = Draw(batch);
  return AutoencoderStep(batch, draws);
}

double AdversarialTrainer::UpdateDiscriminator(std::span<const Triplet> batch) {
  const auto draws = Draw(batch);
  return DiscriminatorStep(batch, draws);
}

double AdversarialTrainer::UpdateGenerator(std::span<const Triplet> batch) {
  const auto draws = Draw(batch);
  return GeneratorStep(batch, draws);
}

EpochReport AdversarialTrainer::RunEpoch(std::span<const Triplet> train,
                                         size_t epoch) {
  const auto start = std::chrono::steady_clock::now();
  EpochReport report;
  report.epoch = epoch;
  const auto batches = ShuffledBatches(train.size(), config_.batch_size,
                                       shuffle_rng_);
  for (size_t b = 0; b < batches.size(); ++b) {
    const std::vector<Triplet> batch = Gather(train, batches[b]);
    try {
      report.loss_autoencoder += UpdateAutoencoder(batch);
      double d_loss = 0.0;
      for (size_t k = 0; k < config_.n_dis; ++k) {
        d_loss += UpdateDiscriminator(batch);
      }
      report.loss_discriminator += d_loss / static_cast<double>(config_.n_dis);
      report.loss_generator += UpdateGenerator(batch);
    } catch (const TrainingError& e) {
      throw TrainingError(WithContext(e, epoch, b));
    }
  }
  const double n = static_cast<double>(std::max<size_t>(batches.size(), 1));
  report.loss_autoencoder /= n;
  report.loss_discriminator /= n;
  report.loss_generator /= n;
  report.entity_norm = FrobeniusNorm(model_.entities().values());
  report.relation_norm = FrobeniusNorm(model_.relations().values());
  report.generator_norm = FrobeniusNorm(gen_.projection.values());
  report.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

BaselineTrainer::BaselineTrainer(const TrainConfig& config,
                                 size_t num_entities, size_t num_relations)
    : config_(config), shuffle_rng_(0), sample_rng_(0) {
  config_.Validate();
  if (config_.sampler == SamplerTag::kAae) {
    throw ConfigError("baseline training needs sampler uniform or "
                      "self_adversarial");
  }
  if (num_entities < 2 || num_relations < 1) {
    throw ConfigError("training needs at least 2 entities and 1 relation");
  }
  Streams streams = MakeStreams(config_.seed);
  model_ = EmbeddingModel::Initialized(config_.scorer_kind(), num_entities,
                                       num_relations, streams.init);
  shuffle_rng_ = streams.shuffle;
  sample_rng_ = streams.sample;
  entities_opt_ = AdagradState(model_.entities().size());
  relations_opt_ = AdagradState(model_.relations().size());
  entity_grads_ = RowGradients(model_.entities().rows(), model_.entities().cols());
  relation_grads_ =
      RowGradients(model_.relations().rows(), model_.relations().cols());
}

std::vector<Triplet> BaselineTrainer::DrawNegatives(
    std::span<const Triplet> batch) {
  std::vector<Triplet> negs;
  negs.reserve(batch.size() * config_.negatives);
  for (const Triplet& pos : batch) {
    for (size_t k = 0; k < config_.negatives; ++k) {
      negs.push_back(
          UniformCorrupt(pos, model_.num_entities(), sample_rng_).corrupted);
    }
  }
  return negs;
}

std::vector<double> BaselineTrainer::NegativeWeights(
    std::span<const Triplet> negatives) const {
  if (config_.sampler == SamplerTag::kSelfAdversarial) {
    return SelfAdversarialWeights(model_, negatives, config_.adv_temperature);
  }
  return std::vector<double>(negatives.size(),
                             1.0 / static_cast<double>(negatives.size()));
}

double BaselineTrainer::Loss(std::span<const Triplet> batch,
                             std::span<const Triplet> negatives) const {
  const size_t k = config_.negatives;
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto negs = negatives.subspan(i * k, k);
    const auto w = NegativeWeights(negs);
    total += NegLogSigmoid(config_.gamma + Score(model_, batch[i]));
    for (size_t j = 0; j < k; ++j) {
      total += w[j] * NegLogSigmoid(-config_.gamma - Score(model_, negs[j]));
    }
  }
  return total / static_cast<double>(batch.size());
}

double BaselineTrainer::Step(std::span<const Triplet> batch,
                             std::span<const Triplet> negatives) {
  if (batch.empty()) throw TrainingError("baseline update: empty batch");
  if (negatives.size() != batch.size() * config_.negatives) {
    throw ShapeError("baseline update: negatives do not match batch");
  }
  entity_grads_.Clear();
  relation_grads_.Clear();
  const size_t k = config_.negatives;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const auto& kind = model_.kind();
  const DenseMatrix& ent = model_.entities();
  const DenseMatrix& rel = model_.relations();
  std::vector<double> gh(ent.cols()), gr(rel.cols()), gt(ent.cols());
  auto accumulate = [&](const Triplet& t, double coef) {
    std::fill(gh.begin(), gh.end(), 0.0);
    std::fill(gr.begin(), gr.end(), 0.0);
    std::fill(gt.begin(), gt.end(), 0.0);
    AccumulateScoreGradients(kind, ent.row(t.head), rel.row(t.relation),
                             ent.row(t.tail), coef, gh, gr, gt);
    entity_grads_.Add(t.head, gh);
    entity_grads_.Add(t.tail, gt);
    relation_grads_.Add(t.relation, gr);
  };

  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto negs = negatives.subspan(i * k, k);
    const auto w = NegativeWeights(negs);
    const double z_pos = config_.gamma + Score(model_, batch[i]);
    total += NegLogSigmoid(z_pos);
    accumulate(batch[i], -Sigmoid(-z_pos) * scale);
    for (size_t j = 0; j < k; ++j) {
      const double s = Score(model_, negs[j]);
      total += w[j] * NegLogSigmoid(-config_.gamma - s);
      accumulate(negs[j], w[j] * Sigmoid(config_.gamma + s) * scale);
    }
  }
  const double loss = total * scale;
  CheckFiniteLoss(loss, "baseline");
  ApplyRows(model_.entities(), entity_grads_, entities_opt_, config_.beta,
            "embeddings.entities");
  ApplyRows(model_.relations(), relation_grads_, relations_opt_, config_.beta,
            "embeddings.relations");
  return loss;
}

EpochReport BaselineTrainer::RunEpoch(std::span<const Triplet> train,
                                      size_t epoch) {
  const auto start = std::chrono::steady_clock::now();
  EpochReport report;
  report.epoch = epoch;
  const auto batches = ShuffledBatches(train.size(), config_.batch_size,
                                       shuffle_rng_);
  for (size_t b = 0; b < batches.size(); ++b) {
    const std::vector<Triplet> batch = Gather(train, batches[b]);
    try {
      const auto negs = DrawNegatives(batch);
      report.loss_discriminator += Step(batch, negs);
    } catch (const TrainingError& e) {
      throw TrainingError(WithContext(e, epoch, b));
    }
  }
  report.loss_discriminator /=
      static_cast<double>(std::max<size_t>(batches.size(), 1));
  report.entity_norm = FrobeniusNorm(model_.entities().values());
  report.relation_norm = FrobeniusNorm(model_.relations().values());
  report.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

TrainResult Train(const TrainConfig& config, const DatasetSplit& split,
                  size_t num_entities, size_t num_relations,
                  const EpochCallback& on_epoch) {
  if (config.sampler != SamplerTag::kAae) {
    throw ConfigError("adversarial training needs sampler aae");
  }
  AdversarialTrainer trainer(config, num_entities, num_relations);
  TrainResult result;
  if (config.epochs > 0 && split.train.empty()) {
    throw DataError("training split is empty");
  }
  for (size_t e = 1; e <= config.epochs; ++e) {
    result.reports.push_back(trainer.RunEpoch(split.train, e));
    if (on_epoch) on_epoch(result.reports.back(), trainer.model());
  }
  result.model = trainer.model();
  return result;
}

TrainResult TrainBaseline(const TrainConfig& config, const DatasetSplit& split,
                          size_t num_entities, size_t num_relations,
                          const EpochCallback& on_epoch) {
  BaselineTrainer trainer(config, num_entities, num_relations);
  TrainResult result;
  if (config.epochs > 0 && split.train.empty()) {
    throw DataError("training split is empty");
  }
  for (size_t e = 1; e <= config.epochs; ++e) {
    result.reports.push_back(trainer.RunEpoch(split.train, e));
    if (on_epoch) on_epoch(result.reports.back(), trainer.model());
  }
  result.model = trainer.model();
  return result;
}

TrainResult TrainAny(const TrainConfig& config, const DatasetSplit& split,
                     size_t num_entities, size_t num_relations,
                     const EpochCallback& on_epoch) {
  return config.sampler == SamplerTag::kAae
             ? Train(config, split, num_entities, num_relations, on_epoch)
             : TrainBaseline(config, split, num_entities, num_relations,
                             on_epoch);
}

}  // namespace ddiadv
