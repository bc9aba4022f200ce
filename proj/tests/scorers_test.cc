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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ddiadv/checkpoint.h"
#include "ddiadv/error.h"
#include "ddiadv/numkit.h"
#include "ddiadv/rng.h"
#include "gtest/gtest.h"

namespace ddiadv {
namespace {

using Complex = std::complex<double>;

constexpr ScorerTag kAllTags[] = {ScorerTag::kTransE, ScorerTag::kDistMult,
                                  ScorerTag::kComplEx, ScorerTag::kSimplE,
                                  ScorerTag::kRotatE};

std::vector<ScorerKind> AllKinds(size_t dim) {
  std::vector<ScorerKind> kinds;
  for (ScorerTag tag : kAllTags) kinds.push_back({tag, DistanceNorm::kL2, dim});
  kinds.push_back({ScorerTag::kTransE, DistanceNorm::kL1, dim});
  return kinds;
}

// Scores written directly from the model definitions, one scorer at a time.
double OracleScore(const ScorerKind& k, const std::vector<double>& h,
                   const std::vector<double>& r, const std::vector<double>& t) {
  const size_t d = k.dim;
  switch (k.tag) {
    case ScorerTag::kTransE: {
      double acc = 0.0;
      for (size_t i = 0; i < d; ++i) {
        const double x = h[i] + r[i] - t[i];
        acc += k.norm == DistanceNorm::kL1 ? std::fabs(x) : x * x;
      }
      return k.norm == DistanceNorm::kL1 ? -acc : -std::sqrt(acc);
    }
    case ScorerTag::kDistMult: {
      double acc = 0.0;
      for (size_t i = 0; i < d; ++i) acc += h[i] * r[i] * t[i];
      return acc;
    }
    case ScorerTag::kComplEx: {
      Complex acc = 0.0;
      for (size_t i = 0; i < d; ++i) {
        acc += Complex(h[i], h[d + i]) * Complex(r[i], r[d + i]) *
               std::conj(Complex(t[i], t[d + i]));
      }
      return acc.real();
    }
    case ScorerTag::kSimplE: {
      double forward = 0.0;
      double inverse = 0.0;
      for (size_t i = 0; i < d; ++i) {
        forward += h[i] * r[i] * t[d + i];
        inverse += t[i] * r[d + i] * h[d + i];
      }
      return 0.5 * (forward + inverse);
    }
    case ScorerTag::kRotatE: {
      double acc = 0.0;
      for (size_t i = 0; i < d; ++i) {
        acc += std::abs(Complex(h[i], h[d + i]) * std::polar(1.0, r[i]) -
                        Complex(t[i], t[d + i]));
      }
      return -acc;
    }
  }
  return 0.0;
}

// Smallest residual magnitude that a distance scorer takes |.| of.
double KinkDistance(const ScorerKind& k, const std::vector<double>& h,
                    const std::vector<double>& r, const std::vector<double>& t) {
  double best = INFINITY;
  const size_t d = k.dim;
  if (k.tag == ScorerTag::kTransE) {
    double sq = 0.0;
    for (size_t i = 0; i < d; ++i) {
      const double x = h[i] + r[i] - t[i];
      sq += x * x;
      if (k.norm == DistanceNorm::kL1) best = std::min(best, std::fabs(x));
    }
    best = std::min(best, std::sqrt(sq));
  } else if (k.tag == ScorerTag::kRotatE) {
    for (size_t i = 0; i < d; ++i) {
      best = std::min(best, std::abs(Complex(h[i], h[d + i]) *
                                         std::polar(1.0, r[i]) -
                                     Complex(t[i], t[d + i])));
    }
  }
  return best;
}

std::vector<double> RandomVector(size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * rng.Uniform() - 1.0;
  return v;
}

std::vector<double> ToVector(std::span<const double> s) {
  return {s.begin(), s.end()};
}

EmbeddingModel TwoDimModel(ScorerTag tag, std::vector<double> ents,
                           std::vector<double> rels, size_t n_ent) {
  EmbeddingModel m({tag, DistanceNorm::kL2, 2}, n_ent, rels.size() /
                   RelationWidth(tag, 2));
  m.entities() = DenseMatrix(n_ent, EntityWidth(tag, 2), std::move(ents));
  m.relations() = DenseMatrix(m.num_relations(), RelationWidth(tag, 2),
                              std::move(rels));
  return m;
}

TEST(ScoreTest, TransEExactTranslationIsMax) {
  const auto m = TwoDimModel(ScorerTag::kTransE, {0, 0, 1, 0}, {1, 0}, 2);
  EXPECT_EQ(Score(m, {0, 0, 1}), 0.0);
  EXPECT_LT(Score(m, {1, 0, 0}), 0.0);
}

TEST(ScoreTest, DistMultHandComputed) {
  const auto m = TwoDimModel(ScorerTag::kDistMult, {1, 2, 3, 1}, {1, 1}, 2);
  EXPECT_EQ(Score(m, {0, 0, 1}), 5.0);
}

TEST(ScoreTest, ComplExRealPartsCollapseToDistMult) {
  Rng rng(1);
  for (int probe = 0; probe < 50; ++probe) {
    auto h = RandomVector(4, rng), r = RandomVector(4, rng),
         t = RandomVector(4, rng);
    auto zero_imag = [](std::vector<double> v) {
      std::vector<double> out(v.begin(), v.end());
      out.resize(8, 0.0);
      return out;
    };
    const double complex_score =
        ScoreRows({ScorerTag::kComplEx, DistanceNorm::kL2, 4}, zero_imag(h),
                  zero_imag(r), zero_imag(t));
    const double distmult_score =
        ScoreRows({ScorerTag::kDistMult, DistanceNorm::kL2, 4}, h, r, t);
    EXPECT_NEAR(complex_score, distmult_score, 1e-15);
  }
}

TEST(ScoreTest, RotatEIdentityRotation) {
  const auto m =
      TwoDimModel(ScorerTag::kRotatE, {0.3, -0.7, 0.1, 0.4, 0.3, -0.7, 0.1, 0.4},
                  {0.0, 0.0}, 2);
  EXPECT_EQ(Score(m, {0, 0, 1}), 0.0);
}

TEST(ScoreTest, OutOfRangeIdsThrow) {
  Rng rng(2);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kComplEx, DistanceNorm::kL2, 3}, 4, 2, rng);
  EXPECT_THROW(Score(m, {4, 0, 1}), LookupError);
  EXPECT_THROW(Score(m, {0, 2, 1}), LookupError);
  EXPECT_THROW(ScoreGradients(m, {0, 0, 9}), LookupError);
  EXPECT_THROW(ScoreAllCandidates(m, {0, 5, 0}, Side::kTail), LookupError);
}

TEST(ScoreTest, MatchesDefinitionOracle) {
  Rng rng(3);
  for (const ScorerKind& k : AllKinds(5)) {
    for (int probe = 0; probe < 100; ++probe) {
      const auto h = RandomVector(EntityWidth(k.tag, 5), rng);
      const auto r = RandomVector(RelationWidth(k.tag, 5), rng);
      const auto t = RandomVector(EntityWidth(k.tag, 5), rng);
      EXPECT_NEAR(ScoreRows(k, h, r, t), OracleScore(k, h, r, t), 1e-12)
          << ScorerName(k.tag);
    }
  }
}

TEST(ScoreTest, DistMultSymmetryIsExact) {
  Rng rng(4);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kDistMult, DistanceNorm::kL2, 8}, 30, 4, rng);
  for (int probe = 0; probe < 1000; ++probe) {
    const Triplet t{static_cast<EntityId>(rng.UniformInt(30)),
                    static_cast<RelationId>(rng.UniformInt(4)),
                    static_cast<EntityId>(rng.UniformInt(30))};
    EXPECT_EQ(Score(m, t), Score(m, {t.tail, t.relation, t.head}));
  }
}

TEST(ScoreTest, ComplExIsAsymmetricWithImaginaryParts) {
  const ScorerKind k{ScorerTag::kComplEx, DistanceNorm::kL2, 1};
  // h = 1, r = i, t = 1 + i: Re(h r conj(t)) = 1, Re(t r conj(h)) = -1.
  const std::vector<double> h{1, 0}, r{0, 1}, t{1, 1};
  EXPECT_DOUBLE_EQ(ScoreRows(k, h, r, t), 1.0);
  EXPECT_DOUBLE_EQ(ScoreRows(k, t, r, h), -1.0);
}

TEST(ScoreTest, SimplEIsAverageOfCpTerms) {
  Rng rng(5);
  const size_t d = 6;
  const ScorerKind k{ScorerTag::kSimplE, DistanceNorm::kL2, d};
  for (int probe = 0; probe < 100; ++probe) {
    const auto h = RandomVector(2 * d, rng), r = RandomVector(2 * d, rng),
               t = RandomVector(2 * d, rng);
    // CP(a, b, c) = sum a_i b_i c_i.
    auto cp = [&](size_t a0, const std::vector<double>& a, size_t b0,
                  const std::vector<double>& b, size_t c0,
                  const std::vector<double>& c) {
      double s = 0.0;
      for (size_t i = 0; i < d; ++i) s += a[a0 + i] * b[b0 + i] * c[c0 + i];
      return s;
    };
    const double expected = (cp(0, h, 0, r, d, t) + cp(0, t, d, r, d, h)) / 2.0;
    EXPECT_NEAR(ScoreRows(k, h, r, t), expected, 1e-12);
  }
}

TEST(ScoreTest, RotatEPreservesNorm) {
  Rng rng(6);
  for (int probe = 0; probe < 100; ++probe) {
    const auto h = RandomVector(8, rng);
    const auto phase = RandomVector(4, rng);
    double before = 0.0, after = 0.0;
    for (size_t i = 0; i < 4; ++i) {
      const Complex x(h[i], h[4 + i]);
      const Complex y = x * std::polar(1.0, phase[i] * std::numbers::pi);
      before += std::norm(x);
      after += std::norm(y);
    }
    EXPECT_NEAR(std::sqrt(before), std::sqrt(after), 1e-9);
    // A zero tail makes the RotatE distance the L1-of-moduli of the rotated head.
    const ScorerKind k{ScorerTag::kRotatE, DistanceNorm::kL2, 4};
    std::vector<double> scaled(phase);
    for (double& p : scaled) p *= std::numbers::pi;
    double moduli = 0.0;
    for (size_t i = 0; i < 4; ++i) moduli += std::abs(Complex(h[i], h[4 + i]));
    EXPECT_NEAR(-ScoreRows(k, h, scaled, std::vector<double>(8, 0.0)), moduli,
                1e-12);
  }
}

TEST(ScoreAllCandidatesTest, AgreesWithSingleScores) {
  Rng rng(7);
  for (const ScorerKind& base : AllKinds(4)) {
    ScorerKind k = base;
    const auto m = EmbeddingModel::Initialized(k, 50, 5, rng);
    for (int probe = 0; probe < 20; ++probe) {
      const Triplet t{static_cast<EntityId>(rng.UniformInt(50)),
                      static_cast<RelationId>(rng.UniformInt(5)),
                      static_cast<EntityId>(rng.UniformInt(50))};
      for (Side side : {Side::kHead, Side::kTail}) {
        const auto all = ScoreAllCandidates(m, t, side);
        ASSERT_EQ(all.size(), 50u);
        for (EntityId e = 0; e < 50; ++e) {
          Triplet sub = t;
          (side == Side::kHead ? sub.head : sub.tail) = e;
          EXPECT_EQ(all[e], Score(m, sub));
        }
        const EntityId truth = side == Side::kHead ? t.head : t.tail;
        EXPECT_EQ(all[truth], Score(m, t));
      }
    }
  }
}

TEST(ScoreGradientsTest, DistMultClosedForm) {
  Rng rng(8);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kDistMult, DistanceNorm::kL2, 5}, 3, 1, rng);
  const auto g = ScoreGradients(m, {0, 0, 2});
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(g.head[i], m.relations()(0, i) * m.entities()(2, i));
  }
}

TEST(ScoreGradientsTest, TransEL2ZeroSubgradient) {
  const auto m = TwoDimModel(ScorerTag::kTransE, {0, 0, 1, 0}, {1, 0}, 2);
  const auto g = ScoreGradients(m, {0, 0, 1});
  for (double v : g.head) EXPECT_EQ(v, 0.0);
  for (double v : g.relation) EXPECT_EQ(v, 0.0);
  for (double v : g.tail) EXPECT_EQ(v, 0.0);
}

// Finite differences of the definition oracle (not the library kernel).
TEST(ScoreGradientsTest, MatchFiniteDifferences) {
  Rng rng(9);
  for (const ScorerKind& base : AllKinds(0)) {
    for (int probe = 0; probe < 100; ++probe) {
      ScorerKind k = base;
      k.dim = 1 + rng.UniformInt(8);
      const size_t ew = EntityWidth(k.tag, k.dim);
      const size_t rw = RelationWidth(k.tag, k.dim);
      std::vector<double> h, r, t;
      // Distance scorers are not differentiable where a residual vanishes;
      // central differences are only meaningful some way off those kinks.
      for (;;) {
        h = RandomVector(ew, rng);
        r = RandomVector(rw, rng);
        t = RandomVector(ew, rng);
        if (KinkDistance(k, h, r, t) > 0.1) break;
      }
      std::vector<double> gh(ew, 0.0), gr(rw, 0.0), gt(ew, 0.0);
      AccumulateScoreGradients(k, h, r, t, 1.0, gh, gr, gt);
      auto fh = [&](std::span<const double> x) {
        return OracleScore(k, ToVector(x), r, t);
      };
      auto fr = [&](std::span<const double> x) {
        return OracleScore(k, h, ToVector(x), t);
      };
      auto ft = [&](std::span<const double> x) {
        return OracleScore(k, h, r, ToVector(x));
      };
      EXPECT_LT(FiniteDifferenceCheck(fh, h, gh), 1e-4) << ScorerName(k.tag);
      EXPECT_LT(FiniteDifferenceCheck(fr, r, gr), 1e-4) << ScorerName(k.tag);
      EXPECT_LT(FiniteDifferenceCheck(ft, t, gt), 1e-4) << ScorerName(k.tag);
    }
  }
}

TEST(ScoreGradientsTest, AccumulateScalesAndAdds) {
  Rng rng(10);
  const ScorerKind k{ScorerTag::kComplEx, DistanceNorm::kL2, 3};
  const auto h = RandomVector(6, rng), r = RandomVector(6, rng),
             t = RandomVector(6, rng);
  std::vector<double> g1h(6, 0.0), g1r(6, 0.0), g1t(6, 0.0);
  AccumulateScoreGradients(k, h, r, t, 1.0, g1h, g1r, g1t);
  std::vector<double> g2h(6, 1.0), g2r(6, 1.0), g2t(6, 1.0);
  AccumulateScoreGradients(k, h, r, t, -2.0, g2h, g2r, g2t);
  for (size_t i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(g2h[i], 1.0 - 2.0 * g1h[i]);
    EXPECT_DOUBLE_EQ(g2t[i], 1.0 - 2.0 * g1t[i]);
  }
}

TEST(EmbeddingModelTest, InitializationRangesAndWidths) {
  Rng rng(11);
  for (const ScorerKind& base : AllKinds(9)) {
    const auto m = EmbeddingModel::Initialized(base, 20, 3, rng);
    EXPECT_EQ(m.entities().cols(), EntityWidth(base.tag, 9));
    EXPECT_EQ(m.relations().cols(), RelationWidth(base.tag, 9));
    const double bound = 6.0 / 3.0;
    for (double v : m.entities().values()) EXPECT_LE(std::fabs(v), bound);
    const double rbound =
        base.tag == ScorerTag::kRotatE ? std::numbers::pi : bound;
    for (double v : m.relations().values()) EXPECT_LE(std::fabs(v), rbound);
    EXPECT_TRUE(AllFinite(m.entities().values()));
  }
  EXPECT_EQ(EntityWidth(ScorerTag::kTransE, 4), 4u);
  EXPECT_EQ(EntityWidth(ScorerTag::kRotatE, 4), 8u);
  EXPECT_EQ(RelationWidth(ScorerTag::kRotatE, 4), 4u);
  EXPECT_EQ(RelationWidth(ScorerTag::kSimplE, 4), 8u);
}

TEST(ScorerNameTest, RoundTrip) {
  for (ScorerTag tag : kAllTags) {
    EXPECT_EQ(ParseScorerTag(ScorerName(tag)), tag);
  }
  EXPECT_FALSE(ParseScorerTag("transh").has_value());
}

TEST(CheckpointTest, EncodeDecodeRoundTrip) {
  Rng rng(12);
  for (const ScorerKind& k : AllKinds(3)) {
    const auto m = EmbeddingModel::Initialized(k, 7, 2, rng);
    const std::string bytes = EncodeCheckpoint(m);
    EXPECT_EQ(bytes.size(), 48 + 8 * (m.entities().size() + m.relations().size()));
    EXPECT_EQ(bytes.substr(0, 8), "DDIADVCK");
    EXPECT_EQ(DecodeCheckpoint(bytes), m);
  }
}

TEST(CheckpointTest, CorruptionIsDataError) {
  Rng rng(13);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kDistMult, DistanceNorm::kL2, 2}, 3, 1, rng);
  std::string bytes = EncodeCheckpoint(m);
  EXPECT_THROW(DecodeCheckpoint(bytes.substr(0, bytes.size() - 1)), DataError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(DecodeCheckpoint(bad_magic), DataError);
  std::string bad_tag = bytes;
  bad_tag[12] = 9;
  EXPECT_THROW(DecodeCheckpoint(bad_tag), DataError);
}

TEST(CheckpointTest, LittleEndianHeader) {
  Rng rng(14);
  const auto m = EmbeddingModel::Initialized(
      {ScorerTag::kSimplE, DistanceNorm::kL2, 5}, 300, 2, rng);
  const std::string b = EncodeCheckpoint(m);
  EXPECT_EQ(static_cast<unsigned char>(b[8]), 1);    // version
  EXPECT_EQ(static_cast<unsigned char>(b[12]), 3);   // SimplE tag
  EXPECT_EQ(static_cast<unsigned char>(b[24]), 300 & 0xff);
  EXPECT_EQ(static_cast<unsigned char>(b[25]), 300 >> 8);
}

TEST(EmbeddingCsvTest, RoundTripReproducesScores) {
  Rng rng(15);
  for (const ScorerKind& k : AllKinds(4)) {
    const auto m = EmbeddingModel::Initialized(k, 12, 3, rng);
    std::vector<std::string> names;
    for (int i = 0; i < 12; ++i) names.push_back("drug" + std::to_string(i));
    const std::string csv = EmbeddingCsv(m.entities(), names);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "name," + [&] {
                std::string h;
                for (size_t i = 0; i < m.entities().cols(); ++i) {
                  h += (i ? ",d" : "d") + std::to_string(i);
                }
                return h;
              }());
    std::vector<std::string> parsed_names;
    EmbeddingModel copy = m;
    copy.entities() = ParseEmbeddingCsv(csv, &parsed_names);
    EXPECT_EQ(parsed_names, names);
    for (int probe = 0; probe < 50; ++probe) {
      const Triplet t{static_cast<EntityId>(rng.UniformInt(12)),
                      static_cast<RelationId>(rng.UniformInt(3)),
                      static_cast<EntityId>(rng.UniformInt(12))};
      EXPECT_NEAR(Score(copy, t), Score(m, t), 1e-9);
    }
  }
}

TEST(HashHexTest, KnownFnvValues) {
  EXPECT_EQ(HashHex(""), "cbf29ce484222325");
  EXPECT_EQ(HashHex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace ddiadv
