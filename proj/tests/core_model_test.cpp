// Copyright 2026 The jointsparse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jointsparse/core_model.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace jointsparse {
namespace {

TEST(NormalizePair, ThreeFourFive) {
  SignalPair p{Vector::Zero(2), Vector::Zero(2), 1.0};
  p.intensity << 3, 4;
  p.depth << 0, 5;
  const NormalizedPair n = normalize_pair(p);
  EXPECT_DOUBLE_EQ(n.signals.intensity(0), 0.6);
  EXPECT_DOUBLE_EQ(n.signals.intensity(1), 0.8);
  EXPECT_DOUBLE_EQ(n.signals.depth(0), 0.0);
  EXPECT_DOUBLE_EQ(n.signals.depth(1), 1.0);
  EXPECT_DOUBLE_EQ(n.scale_intensity, 5.0);
  EXPECT_DOUBLE_EQ(n.scale_depth, 5.0);
  EXPECT_DOUBLE_EQ(n.signals.f0, 1.0);
}

TEST(NormalizePair, UnitInputUnchanged) {
  SignalPair p{Vector::Unit(3, 1), Vector::Unit(4, 0), 1.0};
  const NormalizedPair n = normalize_pair(p);
  EXPECT_EQ(n.signals.intensity, p.intensity);
  EXPECT_EQ(n.signals.depth, p.depth);
  EXPECT_EQ(n.scale_intensity, 1.0);
  EXPECT_EQ(n.scale_depth, 1.0);
}

TEST(NormalizePair, RandomPairUnitNormAndInvertible) {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    SignalPair p{rng.gaussian(9, 1).col(0) * 7.0, rng.gaussian(5, 1).col(0) * 0.01, 1.0};
    const NormalizedPair n = normalize_pair(p);
    EXPECT_NEAR(n.signals.intensity.norm(), 1.0, 1e-12);
    EXPECT_NEAR(n.signals.depth.norm(), 1.0, 1e-12);
    EXPECT_LT((n.signals.intensity * n.scale_intensity - p.intensity).norm(), 1e-12 * p.intensity.norm());
    EXPECT_LT((n.signals.depth * n.scale_depth - p.depth).norm(), 1e-12 * p.depth.norm());
  }
}

TEST(NormalizePair, ZeroSignalRejected) {
  SignalPair p{Vector::Zero(3), Vector::Ones(3), 1.0};
  try {
    normalize_pair(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroSignal);
  }
}

TEST(Coherence, IdentityIsZero) {
  EXPECT_EQ(coherence(Matrix::Identity(4, 4)), 0.0);
}

TEST(Coherence, DuplicateColumnIsOne) {
  Rng rng(3);
  Matrix m = rng.gaussian(5, 4);
  m.col(3) = m.col(1) * 2.5;
  EXPECT_NEAR(coherence(m), 1.0, 1e-14);
}

TEST(Coherence, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Matrix m = rng.gaussian(8, 12);
    EXPECT_NEAR(coherence(m), oracle::brute_force_coherence(m), 1e-14);
  }
}

TEST(Coherence, SingleColumnRejected) {
  EXPECT_THROW(coherence(Matrix::Ones(3, 1)), Error);
}

TEST(Coherence, WorksInSinglePrecision) {
  Eigen::MatrixXf m = Eigen::MatrixXf::Identity(3, 3);
  m(0, 1) = 1.0f;
  EXPECT_NEAR(coherence(m), std::sqrt(0.5f), 1e-6f);
}

TEST(DeltaEstimate, IdentityAndUnitSetSize) {
  EXPECT_EQ(delta_estimate(Matrix::Identity(5, 5), 3, DeltaMode::Worst).delta, 0.0);
  EXPECT_EQ(delta_estimate(Matrix::Identity(5, 5), 4, DeltaMode::Mean).delta, 0.0);
  Rng rng(1);
  const Matrix m = rng.gaussian(8, 12);
  EXPECT_EQ(delta_estimate(m, 1, DeltaMode::Worst).delta, 0.0);
  EXPECT_EQ(delta_estimate(m, 1, DeltaMode::Mean).delta, 0.0);
}

TEST(DeltaEstimate, WorstModeComposesWithCoherence) {
  Rng rng(5);
  const Matrix m = rng.gaussian(8, 12);
  const RipEstimate e = delta_estimate(m, 3, DeltaMode::Worst);
  EXPECT_EQ(e.s, 3);
  EXPECT_NEAR(e.delta, 2.0 * oracle::brute_force_coherence(m), 1e-13);
}

TEST(DeltaEstimate, WorstDominatesMean) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Matrix m = rng.gaussian(6, 10);
    for (Index s = 1; s <= 10; ++s) {
      EXPECT_GE(delta_estimate(m, s, DeltaMode::Worst).delta,
                delta_estimate(m, s, DeltaMode::Mean).delta);
    }
  }
}

TEST(DeltaEstimate, MeanModeIsAverageSignedProduct) {
  Matrix m(2, 3);
  m << 1, 1, 0,
       0, 1, 1;
  // Unit columns: e1, (1,1)/sqrt2, e2. Pairwise products: r, 0, r with r = 1/sqrt2.
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(delta_estimate(m, 3, DeltaMode::Mean).delta, 2.0 * (2.0 * r / 3.0), 1e-15);
}

TEST(GammaOf, EqualCoefficientsGiveZero) {
  Vector a(4);
  a << 0.5, -0.2, 0, 0.9;
  EXPECT_EQ(gamma_of(a, a, {0, 1, 3}), 0.0);
}

TEST(GammaOf, DirectEvaluation) {
  Vector a(2), b(2);
  a << 1, 2;
  b << 2, 1;
  EXPECT_DOUBLE_EQ(gamma_of(a, b, {0, 1}), 0.5);
}

TEST(GammaOf, SymmetricInArguments) {
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const Vector a = rng.gaussian(7, 1).col(0);
    const Vector b = rng.gaussian(7, 1).col(0);
    EXPECT_EQ(gamma_of(a, b, {0, 2, 5}), gamma_of(b, a, {0, 2, 5}));
  }
}

TEST(GammaOf, BothZeroOnSupportRejected) {
  Vector a = Vector::Zero(3), b = Vector::Zero(3);
  a(0) = 1;
  b(0) = 1;
  try {
    gamma_of(a, b, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroOnSupport);
  }
  b(1) = 0.3;  // one-sided zero: ratio 0
  EXPECT_EQ(gamma_of(a, b, {0, 1}), 1.0);
}

TEST(BlockDict, IdentitiesGiveIdentity) {
  EXPECT_EQ(block_dict(Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
            Matrix::Identity(4, 4));
}

TEST(BlockDict, StructureAndProducts) {
  const DictionaryPair d = random_dictionary_pair(3, 5, 4, 11);
  const Matrix a = block_dict(d);
  ASSERT_EQ(a.rows(), 8);
  ASSERT_EQ(a.cols(), 8);
  EXPECT_EQ(a.topRightCorner(3, 4), Matrix::Zero(3, 4));
  EXPECT_EQ(a.bottomLeftCorner(5, 4), Matrix::Zero(5, 4));
  Rng rng(2);
  const Vector ca = rng.gaussian(4, 1).col(0), cb = rng.gaussian(4, 1).col(0);
  Vector stacked(8);
  stacked << ca, cb;
  const Vector prod = a * stacked;
  EXPECT_LT((prod.head(3) - d.intensity * ca).norm(), 1e-14);
  EXPECT_LT((prod.tail(5) - d.depth * cb).norm(), 1e-14);
  for (Index j = 0; j < 4; ++j) {
    EXPECT_NEAR(a.col(j).norm(), d.intensity.col(j).norm(), 1e-15);
    EXPECT_NEAR(a.col(4 + j).norm(), d.depth.col(j).norm(), 1e-15);
  }
}

TEST(RandomDictionary, UnitColumnsAndDeterministic) {
  const DictionaryPair d1 = random_dictionary_pair(64, 64, 128, 42);
  const DictionaryPair d2 = random_dictionary_pair(64, 64, 128, 42);
  EXPECT_EQ(d1.intensity, d2.intensity);
  EXPECT_EQ(d1.depth, d2.depth);
  for (Index j = 0; j < 128; ++j) EXPECT_NEAR(d1.intensity.col(j).norm(), 1.0, 1e-14);
  EXPECT_NE(d1.intensity, random_dictionary_pair(64, 64, 128, 43).intensity);
}

TEST(Synthesize, DefaultRecoverySetup) {
  const DictionaryPair d = random_dictionary_pair(64, 64, 128, 1);
  const SynthesisResult s = synthesize(d, 10, 0.25, 20.0, 99);
  ASSERT_EQ(s.truth.support.size(), 10u);
  EXPECT_TRUE(std::is_sorted(s.truth.support.begin(), s.truth.support.end()));
  EXPECT_LE(s.truth.gamma, 0.25);
  EXPECT_NEAR(s.truth.gamma, gamma_of(s.truth.a0, s.truth.b0, s.truth.support), 0.0);
  for (Index i = 0; i < 128; ++i) {
    const bool on = std::binary_search(s.truth.support.begin(), s.truth.support.end(), i);
    if (!on) {
      EXPECT_EQ(s.truth.a0(i), 0.0);
      EXPECT_EQ(s.truth.b0(i), 0.0);
    } else {
      const double big = std::max(std::abs(s.truth.a0(i)), std::abs(s.truth.b0(i)));
      EXPECT_GE(big, 0.5);
      EXPECT_LE(big, 1.0);
    }
  }
  const Vector clean = d.intensity * s.truth.a0;
  const double snr = 10 * std::log10(clean.squaredNorm() / s.truth.noise_intensity.squaredNorm());
  EXPECT_NEAR(snr, 20.0, 1e-9);
  EXPECT_LT((s.signals.intensity - clean - s.truth.noise_intensity).norm(), 1e-12);
}

TEST(Synthesize, FullSupportZeroGammaEqualMagnitudes) {
  const DictionaryPair d = random_dictionary_pair(6, 6, 8, 4);
  const SynthesisResult s = synthesize(d, 8, 0.0, 30.0, 5);
  EXPECT_EQ(s.truth.support.size(), 8u);
  EXPECT_EQ(s.truth.a0.cwiseAbs(), s.truth.b0.cwiseAbs());
  EXPECT_EQ(s.truth.gamma, 0.0);
}

TEST(Synthesize, NoiselessIsExact) {
  const DictionaryPair d = random_dictionary_pair(16, 12, 32, 8);
  const SynthesisResult s = synthesize(d, 3, 0.4, kNoiseless, 5);
  EXPECT_LE((s.signals.intensity - d.intensity * s.truth.a0).norm(), 1e-10 * s.signals.intensity.norm());
  EXPECT_LE((s.signals.depth - d.depth * s.truth.b0).norm(), 1e-10 * s.signals.depth.norm());
  EXPECT_EQ(s.truth.noise_intensity.norm(), 0.0);
}

TEST(Synthesize, RealizedGammaBelowTarget) {
  const DictionaryPair d = random_dictionary_pair(10, 10, 20, 8);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SynthesisResult s = synthesize(d, 5, 0.3, 25.0, seed);
    EXPECT_LE(gamma_of(s.truth.a0, s.truth.b0, s.truth.support), 0.3);
  }
}

TEST(Synthesize, Deterministic) {
  const DictionaryPair d = random_dictionary_pair(10, 10, 20, 8);
  const SynthesisResult s1 = synthesize(d, 4, 0.2, 15.0, 77);
  const SynthesisResult s2 = synthesize(d, 4, 0.2, 15.0, 77);
  EXPECT_EQ(s1.signals.intensity, s2.signals.intensity);
  EXPECT_EQ(s1.signals.depth, s2.signals.depth);
  EXPECT_EQ(s1.truth.a0, s2.truth.a0);
  EXPECT_EQ(s1.truth.support, s2.truth.support);
  const SynthesisResult s3 = synthesize(d, 4, 0.2, 15.0, 78);
  EXPECT_NE(s1.signals.intensity, s3.signals.intensity);
}

TEST(Synthesize, BadSparsityRejected) {
  const DictionaryPair d = random_dictionary_pair(4, 4, 6, 8);
  try {
    synthesize(d, 7, 0.2, 10.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadSparsity);
  }
}

TEST(Rng, StreamsAreIndependentOfOrder) {
  Rng a(5, Stream::Trial, 3);
  Rng b(5, Stream::Trial, 3);
  Rng c(5, Stream::Trial, 4);
  const double va = a.uniform();
  EXPECT_EQ(va, b.uniform());
  EXPECT_NE(va, c.uniform());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace jointsparse
