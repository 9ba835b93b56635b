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

// Comparison methods: group lasso over (intensity, depth) coefficient pairs
// and total-variation inpainting of a masked image.

#ifndef JOINTSPARSE_BASELINES_HPP
#define JOINTSPARSE_BASELINES_HPP

#include <optional>

#include "jointsparse/core_model.hpp"

namespace jointsparse {

/// Largest singular value by power iteration on A^T A.
double spectral_norm(const Matrix& a, int max_iter = 50, double tol = 1e-10);

struct GlOptions {
  double lambda = 0.3;
  int max_iter = 10000;
  double rel_tol = 1e-8;
  /// Defaults to 1/L, L the larger squared spectral norm of the dictionaries.
  std::optional<double> step;
};

struct GlResult {
  Vector a;
  Vector b;
  double objective = 0.0;
  int iterations = 0;
  /// False when rel_tol was not reached within max_iter.
  bool converged = false;
};

/// Minimizes |yI - PhiI a|^2 + |mD (yD - PhiD b)|^2 + lambda sum_i |(a_i, b_i)|
/// by FISTA with pairwise soft-thresholding. Momentum is reset whenever a
/// step would raise the objective, so accepted iterates never go uphill.
GlResult solve_gl(const Vector& y_intensity, const Vector& y_depth,
                  const DictionaryPair& dicts, const GlOptions& opts,
                  const MaskVector& depth_mask = MaskVector());

double gl_objective(const Vector& y_intensity, const Vector& y_depth,
                    const DictionaryPair& dicts, double lambda, const Vector& a,
                    const Vector& b, const MaskVector& depth_mask = MaskVector());

struct TvOptions {
  double weight = 1.0;
  int max_iter = 500;
  double tol = 1e-6;
};

/// Isotropic TV with forward differences and Neumann boundary.
double total_variation(const Matrix& u);

/// Every unobserved pixel takes the value of the closest observed pixel
/// (Euclidean distance, first in column-major order on ties).
Matrix nearest_fill(const Matrix& image, const MaskMatrix& mask);

/// Minimizes weight * TV(u) subject to u = image on observed pixels, by a
/// Chambolle-Pock primal-dual iteration started from nearest_fill. Observed
/// pixels of the result equal the input bit for bit.
Matrix tv_inpaint(const Matrix& image, const MaskMatrix& mask, const TvOptions& opts = {});

}  // namespace jointsparse

#endif  // JOINTSPARSE_BASELINES_HPP
