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

// Dictionary learning for intensity-depth pairs: preprocessing (whitening,
// patch sampling), alternating sparse inference and dictionary updates, and
// evaluation against a planted dictionary.

#ifndef JOINTSPARSE_LEARNING_HPP
#define JOINTSPARSE_LEARNING_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jointsparse/baselines.hpp"
#include "jointsparse/core_model.hpp"
#include "jointsparse/jbp.hpp"

namespace jointsparse {

// --- preprocessing ----------------------------------------------------------

/// Radial frequency response |f| exp(-(|f| / fc)^4), fc = cutoff * Nyquist,
/// with |f| in cycles per pixel.
struct WhiteningFilter {
  double cutoff = 0.8;

  double response(double frequency) const;
};

struct WhitenResult {
  std::vector<Matrix> images;
  WhiteningFilter filter;
};

/// Flattens the amplitude spectrum of each image. Throws TooSmall below
/// 16 x 16.
WhitenResult whiten(const std::vector<Matrix>& images, const WhiteningFilter& filter = {});

/// Unit-norm patch pairs stored as columns (column-major patch order).
struct PatchBatch {
  Matrix intensity;
  Matrix depth;
  MaskMatrix masks;  // valid depth pixels, same shape as depth

  Index size() const { return intensity.cols(); }
};

/// Draws `count` co-located patch pairs uniformly over all valid positions
/// in all images. Pairs with more than half the depth patch missing, or a
/// zero-norm modality, are discarded and redrawn; Exhausted after
/// 10 * count attempts. An empty `masks` list means fully observed depth.
/// With `center_depth`, the mean of the observed depth pixels is removed
/// before normalization.
PatchBatch sample_patches(const std::vector<Matrix>& intensity,
                          const std::vector<Matrix>& depth,
                          const std::vector<MaskMatrix>& masks, Index size,
                          Index count, std::uint64_t seed, bool center_depth = false);

// --- learning ----------------------------------------------------------------

enum class Inference { Jbp, Gl };

const char* to_string(Inference inference);

struct LearnConfig {
  Index patch_size = 12;
  Index atoms = 0;  // 0: twice the intensity dimension
  Index batch_size = 500;
  int n_iterations = 20;
  double eta = 0.1;
  double rho = 1e-3;
  Inference inference = Inference::Jbp;
  double gl_lambda = 0.3;
  int cg_max = 200;
  double cg_tol = 1e-9;
  std::uint64_t seed = 0;
  bool normalize_atoms = true;
  unsigned threads = 1;
};

/// A source of training batches. `draw(count, seed)` must be a pure function
/// of its arguments.
struct Dataset {
  Index intensity_dim = 0;
  Index depth_dim = 0;
  std::function<PatchBatch(Index count, std::uint64_t seed)> draw;
};

/// Columns of a fixed signal pool, sampled without replacement per batch
/// (the whole pool, in order, when count >= pool size). Each column pair is
/// normalized per modality.
Dataset pool_dataset(Matrix intensity, Matrix depth, MaskMatrix masks = MaskMatrix());

/// Patches drawn from images with sample_patches.
Dataset image_dataset(std::vector<Matrix> intensity, std::vector<Matrix> depth,
                      std::vector<MaskMatrix> masks, Index patch_size,
                      bool center_depth = false);

struct LearnRecord {
  double mean_residual = 0.0;  // mean of |yI - PhiI a|^2 + masked depth term
  double mean_activity = 0.0;  // mean of sum_i max(|a_i|, |b_i|)
  double change_intensity = 0.0;  // Frobenius norm of the dictionary update
  double change_depth = 0.0;
  Index solved = 0;
  Index failed = 0;
};

struct LearnHistory {
  std::vector<LearnRecord> records;
};

struct LearnResult {
  DictionaryPair dicts;
  LearnHistory history;
};

struct CgOptions {
  int max_iter = 200;
  double tol = 1e-9;
};

/// Sparse codes for a batch; columns whose inference failed are flagged.
struct BatchCodes {
  Matrix a;
  Matrix b;
  std::vector<bool> ok;
};

BatchCodes infer_batch(const PatchBatch& batch, const DictionaryPair& dicts,
                       const LearnConfig& config);

/// Per modality, conjugate gradient on |Y - Phi C|_F^2 + rho |Phi|_F^2 (the
/// depth residual restricted to observed pixels). Atoms with an all-zero
/// coefficient row keep their previous column. With `normalize`, columns are
/// rescaled to unit norm afterwards.
DictionaryPair update_dictionaries(const PatchBatch& batch, const Matrix& a,
                                   const Matrix& b, const DictionaryPair& dicts,
                                   double rho, const CgOptions& cg = {},
                                   bool normalize = true);

/// Seeded unit-norm Gaussian initial dictionaries.
DictionaryPair initial_dictionaries(Index intensity_dim, Index depth_dim, Index atoms,
                                    std::uint64_t seed);

LearnResult learn(const Dataset& data, const LearnConfig& config);

// --- evaluation --------------------------------------------------------------

struct AtomMatch {
  std::vector<Index> assignment;  // learned atom matched to each true atom
  std::vector<double> mse;        // per true atom
  Index recovered = 0;
};

/// Optimal one-to-one matching of stacked, unit-normalized [intensity; depth]
/// atoms. The sign of each half is aligned separately, since flipping one
/// modality's atom and coefficient leaves the model unchanged. The per-atom
/// error is the squared distance between the aligned unit stacked atoms.
AtomMatch match_atoms(const DictionaryPair& learned, const DictionaryPair& truth,
                      double threshold = 0.05);

// --- persistence ---------------------------------------------------------------

struct DictionaryMetadata {
  Index patch_size = 0;
  double eta = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// Writes <prefix>_intensity.mat, <prefix>_depth.mat and <prefix>_meta.cfg.
void save_dictionaries(const std::string& prefix, const DictionaryPair& dicts,
                       const DictionaryMetadata& meta);
DictionaryPair load_dictionaries(const std::string& prefix,
                                 DictionaryMetadata* meta = nullptr);

}  // namespace jointsparse

#endif  // JOINTSPARSE_LEARNING_HPP
