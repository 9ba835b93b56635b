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

#include "jointsparse/learning.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace jointsparse {
namespace {

using Complex = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

// Naive 2-D DFT magnitude, kept separate from the library's FFT path.
Matrix dft_magnitude(const Matrix& img) {
  const Index n = img.rows(), m = img.cols();
  Matrix out(n, m);
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < m; ++v) {
      Complex acc = 0;
      for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < m; ++y)
          acc += img(x, y) * std::polar(1.0, -2 * kPi * (double(u * x) / n + double(v * y) / m));
      out(u, v) = std::abs(acc);
    }
  }
  return out;
}

double freq(Index k, Index n) { return double(k <= n / 2 ? k : k - n) / double(n); }

// Random-phase image whose amplitude spectrum falls as 1/f.
Matrix pink_image(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix img = Matrix::Zero(n, n);
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      const double f = std::hypot(freq(u, n), freq(v, n));
      if (f == 0) continue;
      const double phase = rng.uniform(0, 2 * kPi);
      for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y)
          img(x, y) += std::cos(2 * kPi * (double(u * x + v * y) / n) + phase) / f;
    }
  }
  return img;
}

// Least-squares slope of log radial amplitude against log frequency over a band.
double spectral_slope(const Matrix& mag, double lo, double hi) {
  const Index n = mag.rows();
  std::vector<double> xs, ys;
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      const double f = std::hypot(freq(u, n), freq(v, n));
      if (f < lo || f > hi) continue;
      xs.push_back(std::log(f));
      ys.push_back(std::log(mag(u, v)));
    }
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

TEST(Whitening, FlattensPinkSpectrum) {
  const Matrix img = pink_image(32, 4);
  const double before = spectral_slope(dft_magnitude(img), 0.05, 0.25);
  EXPECT_NEAR(before, -1.0, 0.3);
  const WhitenResult w = whiten({img});
  EXPECT_NEAR(spectral_slope(dft_magnitude(w.images[0]), 0.05, 0.25), 0.0, 0.3);
}

TEST(Whitening, ConstantImageVanishes) {
  const WhitenResult w = whiten({Matrix::Constant(20, 24, 3.5)});
  EXPECT_LT(w.images[0].cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Whitening, FilterShape) {
  const WhiteningFilter f;
  EXPECT_EQ(f.response(0.0), 0.0);
  EXPECT_NEAR(f.response(0.4), 0.4 * std::exp(-1.0), 1e-15);
}

TEST(Whitening, RejectsSmallImages) {
  EXPECT_THROW(whiten({Matrix::Ones(15, 40)}), Error);
}

TEST(SamplePatches, WholeImagePatchIsNormalizedColumnMajor) {
  Matrix a(12, 12), d(12, 12);
  for (Index c = 0; c < 12; ++c)
    for (Index r = 0; r < 12; ++r) {
      a(r, c) = 1 + r + 12 * c;
      d(r, c) = 1 + std::sin(double(r * c));
    }
  const PatchBatch b = sample_patches({a}, {d}, {}, 12, 3, 7);
  ASSERT_EQ(b.size(), 3);
  const Vector va = Eigen::Map<const Vector>(a.data(), 144).normalized();
  const Vector vd = Eigen::Map<const Vector>(d.data(), 144).normalized();
  for (Index j = 0; j < 3; ++j) {
    EXPECT_LT((b.intensity.col(j) - va).norm(), 1e-14);
    EXPECT_LT((b.depth.col(j) - vd).norm(), 1e-14);
    EXPECT_TRUE(b.masks.col(j).all());
  }
}

TEST(SamplePatches, MaskedDepthIsZeroedAndNormalizedOnObserved) {
  Rng rng(2);
  const Matrix a = rng.gaussian(20, 20), d = rng.gaussian(20, 20);
  MaskMatrix m = MaskMatrix::Constant(20, 20, true);
  for (Index r = 0; r < 20; r += 3) m.row(r).setConstant(false);
  const PatchBatch b = sample_patches({a}, {d}, {m}, 6, 40, 3);
  for (Index j = 0; j < b.size(); ++j) {
    EXPECT_NEAR(b.depth.col(j).norm(), 1.0, 1e-12);
    EXPECT_NEAR(b.intensity.col(j).norm(), 1.0, 1e-12);
    for (Index k = 0; k < 36; ++k)
      if (!b.masks(k, j)) EXPECT_EQ(b.depth(k, j), 0.0);
  }
}

TEST(SamplePatches, CenteredDepthHasZeroObservedMean) {
  Rng rng(4);
  const Matrix a = rng.gaussian(20, 20);
  const Matrix d = (rng.gaussian(20, 20).array() + 5.0).matrix();
  MaskMatrix m = MaskMatrix::Constant(20, 20, true);
  for (Index c = 0; c < 20; c += 4) m.col(c).setConstant(false);
  const PatchBatch b = sample_patches({a}, {d}, {m}, 6, 30, 8, true);
  for (Index j = 0; j < b.size(); ++j) {
    EXPECT_NEAR(b.depth.col(j).norm(), 1.0, 1e-12);
    EXPECT_NEAR(b.masks.col(j).select(b.depth.col(j), 0.0).sum(), 0.0, 1e-12);
  }
}

TEST(SamplePatches, FullyMaskedDepthIsExhausted) {
  const Matrix a = Matrix::Ones(20, 20);
  const MaskMatrix m = MaskMatrix::Constant(20, 20, false);
  try {
    sample_patches({a}, {a}, {m}, 8, 5, 1);
    FAIL() << "expected Exhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Exhausted);
  }
}

TEST(SamplePatches, DeterministicInSeed) {
  Rng rng(9);
  const std::vector<Matrix> a{rng.gaussian(30, 25), rng.gaussian(18, 40)};
  const std::vector<Matrix> d{rng.gaussian(30, 25), rng.gaussian(18, 40)};
  const PatchBatch p = sample_patches(a, d, {}, 8, 50, 11);
  const PatchBatch q = sample_patches(a, d, {}, 8, 50, 11);
  const PatchBatch r = sample_patches(a, d, {}, 8, 50, 12);
  EXPECT_EQ(p.intensity, q.intensity);
  EXPECT_EQ(p.depth, q.depth);
  EXPECT_NE(p.intensity, r.intensity);
}

// Ridge solution Y C^T (C C^T + rho I)^{-1} for a fully observed modality.
Matrix ridge(const Matrix& y, const Matrix& c, double rho) {
  const Matrix g = c * c.transpose() + rho * Matrix::Identity(c.rows(), c.rows());
  return g.transpose().ldlt().solve((y * c.transpose()).transpose()).transpose();
}

TEST(UpdateDictionaries, MatchesRidgeClosedForm) {
  Rng rng(5);
  const Index n = 8, atoms = 12, count = 40;
  const DictionaryPair d = random_dictionary_pair(n, n, atoms, 1);
  PatchBatch b{rng.gaussian(n, count), rng.gaussian(n, count),
               MaskMatrix::Constant(n, count, true)};
  const Matrix a = rng.gaussian(atoms, count), c = rng.gaussian(atoms, count);
  const double rho = 0.05;
  const DictionaryPair out = update_dictionaries(b, a, c, d, rho, CgOptions{500, 1e-13}, false);
  EXPECT_LT((out.intensity - ridge(b.intensity, a, rho)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((out.depth - ridge(b.depth, c, rho)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(UpdateDictionaries, MaskedDepthMatchesRowwiseRidge) {
  Rng rng(6);
  const Index n = 6, atoms = 5, count = 30;
  const DictionaryPair d = random_dictionary_pair(n, n, atoms, 2);
  PatchBatch b{rng.gaussian(n, count), rng.gaussian(n, count), MaskMatrix(n, count)};
  for (Index k = 0; k < b.masks.size(); ++k) b.masks(k) = rng.uniform() < 0.7;
  const Matrix a = rng.gaussian(atoms, count), c = rng.gaussian(atoms, count);
  const double rho = 0.1;
  const DictionaryPair out = update_dictionaries(b, a, c, d, rho, CgOptions{500, 1e-13}, false);
  // Each depth row decouples: ridge over the columns where that pixel is seen.
  for (Index r = 0; r < n; ++r) {
    Matrix g = rho * Matrix::Identity(atoms, atoms);
    Vector rhs = Vector::Zero(atoms);
    for (Index j = 0; j < count; ++j) {
      if (!b.masks(r, j)) continue;
      g += c.col(j) * c.col(j).transpose();
      rhs += b.depth(r, j) * c.col(j);
    }
    const Vector row = g.ldlt().solve(rhs);
    EXPECT_LT((out.depth.row(r).transpose() - row).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(UpdateDictionaries, IdentityCodesReproduceData) {
  Rng rng(7);
  const Index n = 5;
  const DictionaryPair d = random_dictionary_pair(n, n, n, 3);
  PatchBatch b{rng.gaussian(n, n), rng.gaussian(n, n), MaskMatrix::Constant(n, n, true)};
  const Matrix eye = Matrix::Identity(n, n);
  const DictionaryPair out = update_dictionaries(b, eye, eye, d, 0.0, CgOptions{100, 1e-14}, false);
  EXPECT_LT((out.intensity - b.intensity).norm(), 1e-9);
  EXPECT_LT((out.depth - b.depth).norm(), 1e-9);
}

TEST(UpdateDictionaries, ZeroCodesKeepDictionaries) {
  Rng rng(8);
  const DictionaryPair d = random_dictionary_pair(6, 6, 9, 4);
  PatchBatch b{rng.gaussian(6, 10), rng.gaussian(6, 10), MaskMatrix::Constant(6, 10, true)};
  const Matrix zero = Matrix::Zero(9, 10);
  const DictionaryPair out = update_dictionaries(b, zero, zero, d, 1e-3);
  EXPECT_EQ(out.intensity, d.intensity);
  EXPECT_EQ(out.depth, d.depth);
}

TEST(UpdateDictionaries, DoesNotIncreaseRegularizedObjective) {
  Rng rng(10);
  const Index n = 7, atoms = 10, count = 25;
  const DictionaryPair d = random_dictionary_pair(n, n, atoms, 5);
  PatchBatch b{rng.gaussian(n, count), rng.gaussian(n, count), MaskMatrix(n, count)};
  for (Index k = 0; k < b.masks.size(); ++k) b.masks(k) = rng.uniform() < 0.8;
  Matrix a = rng.gaussian(atoms, count), c = rng.gaussian(atoms, count);
  a.row(3).setZero();
  const double rho = 0.01;
  auto objective = [&](const DictionaryPair& p) {
    const Matrix rd = b.masks.select(b.depth - p.depth * c, 0.0);
    return (b.intensity - p.intensity * a).squaredNorm() + rd.squaredNorm() +
           rho * (p.intensity.squaredNorm() + p.depth.squaredNorm());
  };
  const DictionaryPair out = update_dictionaries(b, a, c, d, rho, {}, false);
  EXPECT_LE(objective(out), objective(d) + 1e-12);
  EXPECT_EQ(out.intensity.col(3), d.intensity.col(3));
}

TEST(Learn, ZeroIterationsReturnsInitialization) {
  Rng rng(11);
  const Dataset data = pool_dataset(rng.gaussian(9, 50), rng.gaussian(9, 50));
  LearnConfig cfg;
  cfg.n_iterations = 0;
  cfg.seed = 42;
  const LearnResult r = learn(data, cfg);
  const DictionaryPair init = initial_dictionaries(9, 9, 18, 42);
  EXPECT_EQ(r.dicts.intensity, init.intensity);
  EXPECT_EQ(r.dicts.depth, init.depth);
  EXPECT_TRUE(r.history.records.empty());
}

TEST(Learn, KeepsUnitAtomsAndIsDeterministic) {
  const DictionaryPair truth = random_dictionary_pair(8, 8, 12, 13);
  Matrix yi(8, 60), yd(8, 60);
  for (Index j = 0; j < 60; ++j) {
    const SynthesisResult s = synthesize(truth, 2, 0.5, kNoiseless, 100 + j);
    yi.col(j) = s.signals.intensity;
    yd.col(j) = s.signals.depth;
  }
  LearnConfig cfg;
  cfg.atoms = 12;
  cfg.batch_size = 20;
  cfg.n_iterations = 3;
  cfg.seed = 3;
  const Dataset data = pool_dataset(yi, yd);
  const LearnResult r = learn(data, cfg);
  ASSERT_EQ(r.history.records.size(), 3u);
  for (Index j = 0; j < 12; ++j) {
    EXPECT_NEAR(r.dicts.intensity.col(j).norm(), 1.0, 1e-12);
    EXPECT_NEAR(r.dicts.depth.col(j).norm(), 1.0, 1e-12);
  }
  for (const LearnRecord& rec : r.history.records) {
    EXPECT_EQ(rec.solved + rec.failed, 20);
    EXPECT_GT(rec.solved, 0);
  }
  cfg.threads = 3;
  const LearnResult again = learn(data, cfg);
  EXPECT_EQ(r.dicts.intensity, again.dicts.intensity);
  EXPECT_EQ(r.dicts.depth, again.dicts.depth);
}

TEST(Learn, GroupLassoInferenceRuns) {
  Rng rng(12);
  LearnConfig cfg;
  cfg.inference = Inference::Gl;
  cfg.atoms = 10;
  cfg.batch_size = 15;
  cfg.n_iterations = 2;
  const LearnResult r = learn(pool_dataset(rng.gaussian(6, 30), rng.gaussian(6, 30)), cfg);
  EXPECT_EQ(r.history.records.back().failed, 0);
  EXPECT_STREQ(to_string(cfg.inference), "gl");
}

TEST(MatchAtoms, IdentityIsPerfect) {
  const DictionaryPair d = random_dictionary_pair(6, 5, 8, 14);
  const AtomMatch m = match_atoms(d, d);
  EXPECT_EQ(m.recovered, 8);
  for (Index j = 0; j < 8; ++j) {
    EXPECT_EQ(m.assignment[j], j);
    EXPECT_NEAR(m.mse[j], 0.0, 1e-24);
  }
}

TEST(MatchAtoms, UndoesPermutationAndSignFlips) {
  const DictionaryPair d = random_dictionary_pair(6, 6, 7, 15);
  const std::vector<Index> perm{3, 0, 6, 1, 5, 2, 4};
  DictionaryPair shuffled = d;
  for (Index j = 0; j < 7; ++j) {
    const double s = j % 2 ? -1.0 : 1.0;
    shuffled.intensity.col(perm[j]) = s * d.intensity.col(j);
    shuffled.depth.col(perm[j]) = s * d.depth.col(j);
  }
  const AtomMatch m = match_atoms(shuffled, d);
  EXPECT_EQ(m.recovered, 7);
  for (Index j = 0; j < 7; ++j) EXPECT_EQ(m.assignment[j], perm[j]);
}

TEST(MatchAtoms, FlipsEachModalityIndependently) {
  const DictionaryPair d = random_dictionary_pair(6, 6, 5, 19);
  DictionaryPair flipped = d;
  flipped.depth.col(1) *= -1.0;
  flipped.intensity.col(3) *= -1.0;
  const AtomMatch m = match_atoms(flipped, d);
  EXPECT_EQ(m.recovered, 5);
  for (const double e : m.mse) EXPECT_NEAR(e, 0.0, 1e-12);
}

TEST(MatchAtoms, AgreesWithBruteForceUnderNoise) {
  Rng rng(16);
  const Index n = 6;
  const DictionaryPair truth = random_dictionary_pair(5, 5, n, 17);
  DictionaryPair noisy{truth.intensity + 0.01 * rng.gaussian(5, n),
                       truth.depth + 0.01 * rng.gaussian(5, n)};
  Matrix t(10, n), l(10, n);
  t << truth.intensity, truth.depth;
  l << noisy.intensity, noisy.depth;
  t.colwise().normalize();
  l.colwise().normalize();
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double total = 0;
    for (Index j = 0; j < n; ++j) {
      // Best of the four per-half sign choices.
      double best_pair = 1e300;
      for (const double si : {1.0, -1.0})
        for (const double sd : {1.0, -1.0}) {
          Vector flipped = l.col(perm[j]);
          flipped.head(5) *= si;
          flipped.tail(5) *= sd;
          best_pair = std::min(best_pair, (t.col(j) - flipped).squaredNorm());
        }
      total += best_pair;
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const AtomMatch m = match_atoms(noisy, truth);
  EXPECT_NEAR(std::accumulate(m.mse.begin(), m.mse.end(), 0.0), best, 1e-12);
}

TEST(MatchAtoms, RejectsShapeMismatch) {
  EXPECT_THROW(match_atoms(random_dictionary_pair(5, 5, 6, 1), random_dictionary_pair(5, 5, 7, 1)),
               Error);
}

TEST(Persistence, RoundTrip) {
  const DictionaryPair d = random_dictionary_pair(9, 9, 14, 18);
  const auto dir = std::filesystem::temp_directory_path() / "jointsparse_learning_test";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "dict").string();
  save_dictionaries(prefix, d, DictionaryMetadata{3, 0.1, 20, 77});
  DictionaryMetadata meta;
  const DictionaryPair back = load_dictionaries(prefix, &meta);
  EXPECT_EQ(back.intensity, d.intensity);
  EXPECT_EQ(back.depth, d.depth);
  EXPECT_EQ(meta.patch_size, 3);
  EXPECT_EQ(meta.eta, 0.1);
  EXPECT_EQ(meta.iterations, 20);
  EXPECT_EQ(meta.seed, 77u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace jointsparse
