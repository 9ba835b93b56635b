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

// Experiment pipelines: coefficient recovery against the recovery bound,
// dictionary recovery from planted data, and depth inpainting on synthetic
// scenes. Each experiment takes a plain options struct that can be read from
// a key-value config file and produces a CSV table whose metadata line
// records the config hash and seed.

#ifndef JOINTSPARSE_HARNESS_HPP
#define JOINTSPARSE_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jointsparse/io.hpp"
#include "jointsparse/learning.hpp"

namespace jointsparse {

/// Exactly round(keep_fraction * pixels) entries set, chosen uniformly
/// without replacement.
MaskMatrix mask_random(const Matrix& image, double keep_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic scenes

struct SceneOptions {
  Index rows = 64;
  Index cols = 64;
  Index regions = 5;
  double max_slope = 0.004;     // depth change per pixel within a region
  double grating_lo = 0.08;     // grating frequency range, cycles per pixel
  double grating_hi = 0.2;
  double grating_contrast = 0.25;
};

struct Scene {
  Matrix intensity;
  Matrix depth;
};

/// Voronoi partition into planar depth regions separated by step edges. Each
/// region carries a sinusoidal grating running along its depth gradient on
/// top of its own albedo, so intensity edges coincide with depth edges.
Scene make_scene(const SceneOptions& opts, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Coefficient recovery

struct RecoveryConfig {
  std::uint64_t seed = 1;
  Index trials = 50;
  std::vector<double> snr_db{10, 15, 20, 25, 30};
  Index rows = 64;
  Index atoms = 128;
  Index sparsity = 10;
  double gamma = 0.25;
  double eta = 0.1;
  std::vector<double> m_values{25, 64};
  double lambda_lo = 1e-4;  // GL calibration bracket
  double lambda_hi = 10.0;
  double match_tol = 0.05;  // relative residual mismatch accepted
  unsigned threads = 1;

  static RecoveryConfig from(const Config& c);
  Config to_config() const;
};

/// Columns: snr, jbp_err, gl_err, bound_M<m>... The GL lambda found for each
/// SNR is logged in the metadata.
CsvTable run_recovery_experiment(const RecoveryConfig& cfg);

// ---------------------------------------------------------------------------
// Dictionary recovery

struct DictRecoveryConfig {
  std::uint64_t seed = 1;
  Index rows = 16;
  Index atoms = 32;
  Index samples = 2000;
  std::vector<double> sparsity{2, 3, 4};
  double gamma = 0.25;
  double snr_db = kNoiseless;
  double eta = 0.1;
  double gl_lambda = 0.3;
  double rho = 1e-3;
  Index batch_size = 250;
  int iterations = 200;
  double threshold = 0.05;
  bool inject_truth = false;  // skip learning and score the planted pair
  unsigned threads = 1;

  static DictRecoveryConfig from(const Config& c);
  Config to_config() const;
};

/// Columns: sparsity, jbp_mse, jbp_recovered, gl_mse, gl_recovered
/// (recovered as a percentage of atoms).
CsvTable run_dict_recovery_experiment(const DictRecoveryConfig& cfg);

// ---------------------------------------------------------------------------
// Inpainting

struct InpaintConfig {
  std::uint64_t seed = 1;
  SceneOptions scene;
  double keep_fraction = 0.04;
  Index patch_size = 8;
  Index stride = 0;  // 0: half the patch size
  double eta = 0.1;
  double gl_lambda = 0.3;
  bool whiten = true;
  // Dictionaries: learned on centered depth patches of training scenes
  // unless both prefixes are set.
  std::string jbp_dictionary;
  std::string gl_dictionary;
  Index train_scenes = 4;
  Index learn_batch = 200;
  int learn_iterations = 15;
  double rho = 1e-3;
  int tv_iterations = 2000;
  unsigned threads = 1;

  static InpaintConfig from(const Config& c);
  Config to_config() const;
};

enum class PatchMethod { Jbp, Gl };

struct PatchInpaintOptions {
  Index patch_size = 8;
  Index stride = 4;
  double eta = 0.1;
  double gl_lambda = 0.3;
  // Code depth around the mean of the observed pixels in each tile. The
  // dictionaries must then be trained on centered depth patches.
  bool center_depth = true;
  unsigned threads = 1;
};

/// Reconstructs a depth map from full intensity and the observed depth
/// pixels. Overlapping tiles are coded independently and averaged with
/// uniform weights. Tiles without an observed depth pixel carry no depth
/// information and are skipped; pixels no tile covers fall back to the
/// nearest observed value. Observed pixels are copied from the input.
Matrix inpaint_depth(const Matrix& intensity, const Matrix& depth, const MaskMatrix& mask,
                     const DictionaryPair& dicts, PatchMethod method,
                     const PatchInpaintOptions& opts);

/// Mean squared error after mapping the reference range to [0, 1].
double range_mse(const Matrix& estimate, const Matrix& reference);

struct InpaintResult {
  CsvTable table;  // columns: keep_fraction, mse_jbp, mse_gl, mse_tv
  Scene scene;
  MaskMatrix mask;
  Matrix jbp;
  Matrix gl;
  Matrix tv;
  DictionaryPair jbp_dicts;
  DictionaryPair gl_dicts;
};

InpaintResult run_inpaint_experiment(const InpaintConfig& cfg);

}  // namespace jointsparse

#endif  // JOINTSPARSE_HARNESS_HPP
