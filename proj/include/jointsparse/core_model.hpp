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

// Joint intensity-depth generative model: data types, synthetic instances and
// dictionary geometry (coherence, restricted-isometry estimates).

#ifndef JOINTSPARSE_CORE_MODEL_HPP
#define JOINTSPARSE_CORE_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "jointsparse/errors.hpp"
#include "jointsparse/random.hpp"

namespace jointsparse {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MaskVector = Eigen::Array<bool, Eigen::Dynamic, 1>;
using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using IndexSet = std::vector<Index>;

/// SNR sentinel meaning "no noise".
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Intensity and depth dictionaries sharing one atom index set.
struct DictionaryPair {
  Matrix intensity;  // nI x N
  Matrix depth;      // nD x N

  Index atoms() const { return intensity.cols(); }

  /// Throws DimensionMismatch if the atom counts differ or any atom is zero.
  void validate() const;
};

struct SignalPair {
  Vector intensity;
  Vector depth;
  double f0 = 1.0;
};

/// Coefficients and coupling activities for one signal pair.
struct JointCode {
  Vector a;
  Vector b;
  Vector x;
  double u_intensity = 1.0;
  double u_depth = 1.0;
};

struct GroundTruth {
  IndexSet support;
  Vector a0;
  Vector b0;
  double gamma = 0.0;
  Vector noise_intensity;
  Vector noise_depth;
};

enum class DeltaMode { Worst, Mean };

struct RipEstimate {
  Index s = 1;
  double delta = 0.0;
  DeltaMode mode = DeltaMode::Worst;
};

// ---------------------------------------------------------------------------
// Dictionary geometry

namespace detail {

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
normalized_gram(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cols = m;
  for (Index j = 0; j < cols.cols(); ++j) {
    const Scalar n = cols.col(j).norm();
    if (n > Scalar(0)) cols.col(j) /= n;
  }
  return cols.transpose() * cols;
}

}  // namespace detail

/// Largest absolute inner product between distinct unit-normalized columns.
template <typename Derived>
typename Derived::Scalar coherence(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require(m.cols() >= 2, ErrorCode::SingleColumn,
          "coherence needs at least two columns");
  const auto gram = detail::normalized_gram(m);
  Scalar mu(0);
  for (Index j = 0; j < gram.cols(); ++j)
    for (Index i = 0; i < j; ++i) mu = std::max<Scalar>(mu, std::abs(gram(i, j)));
  return std::min<Scalar>(mu, Scalar(1));
}

/// Restricted isometry estimate delta_s = c * (s - 1).
///
/// Worst mode uses the coherence for c. Mean mode uses the magnitude of the
/// average signed inner product over all distinct column pairs; this is the
/// average-case proxy used when plotting the recovery bound.
template <typename Derived>
RipEstimate delta_estimate(const Eigen::MatrixBase<Derived>& m, Index s,
                           DeltaMode mode) {
  require(s >= 1 && s <= m.cols(), ErrorCode::InvalidArgument,
          "delta_estimate: s must lie in [1, cols]");
  if (s == 1) return {s, 0.0, mode};
  double c = 0.0;
  if (mode == DeltaMode::Worst) {
    c = static_cast<double>(coherence(m));
  } else {
    const auto gram = detail::normalized_gram(m);
    double sum = 0.0;
    for (Index j = 0; j < gram.cols(); ++j)
      for (Index i = 0; i < j; ++i) sum += static_cast<double>(gram(i, j));
    const double pairs = 0.5 * static_cast<double>(gram.cols()) *
                         static_cast<double>(gram.cols() - 1);
    c = std::abs(sum / pairs);
  }
  return {s, c * static_cast<double>(s - 1), mode};
}

/// Block-diagonal [phiI 0; 0 phiD].
template <typename DerivedI, typename DerivedD>
Eigen::Matrix<typename DerivedI::Scalar, Eigen::Dynamic, Eigen::Dynamic>
block_dict(const Eigen::MatrixBase<DerivedI>& phi_i,
           const Eigen::MatrixBase<DerivedD>& phi_d) {
  using Scalar = typename DerivedI::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          phi_i.rows() + phi_d.rows(), phi_i.cols() + phi_d.cols());
  out.topLeftCorner(phi_i.rows(), phi_i.cols()) = phi_i;
  out.bottomRightCorner(phi_d.rows(), phi_d.cols()) = phi_d;
  return out;
}

inline Matrix block_dict(const DictionaryPair& dicts) {
  return block_dict(dicts.intensity, dicts.depth);
}

/// 1 - min over the support of min(|a_i|/|b_i|, |b_i|/|a_i|).
///
/// A support index where exactly one coefficient vanishes contributes a
/// ratio of 0; an index where both vanish is rejected.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar gamma_of(const Eigen::MatrixBase<DerivedA>& a0,
                                   const Eigen::MatrixBase<DerivedB>& b0,
                                   const IndexSet& support) {
  using Scalar = typename DerivedA::Scalar;
  require(a0.size() == b0.size(), ErrorCode::DimensionMismatch,
          "gamma_of: coefficient vectors differ in length");
  Scalar min_ratio(1);
  for (const Index i : support) {
    require(i >= 0 && i < a0.size(), ErrorCode::InvalidArgument,
            "gamma_of: support index out of range");
    const Scalar ai = std::abs(a0(i));
    const Scalar bi = std::abs(b0(i));
    require(ai > Scalar(0) || bi > Scalar(0), ErrorCode::ZeroOnSupport,
            "both coefficients vanish at support index " + std::to_string(i));
    const Scalar ratio = std::min(ai, bi) / std::max(ai, bi);
    min_ratio = std::min(min_ratio, ratio);
  }
  return Scalar(1) - min_ratio;
}

// ---------------------------------------------------------------------------
// Signals

struct NormalizedPair {
  SignalPair signals;
  double scale_intensity = 1.0;  // original norm of the intensity signal
  double scale_depth = 1.0;
};

/// Rescales both signals to unit norm (f0 = 1). Multiplying back by the
/// returned scales recovers the inputs.
NormalizedPair normalize_pair(const SignalPair& pair);

/// i.i.d. Gaussian dictionary with unit-norm columns.
Matrix random_dictionary(Index rows, Index cols, Rng& rng);
DictionaryPair random_dictionary_pair(Index rows_intensity, Index rows_depth,
                                      Index atoms, std::uint64_t seed);

struct SynthesisResult {
  SignalPair signals;
  GroundTruth truth;
};

/// Draws a planted jointly sparse pair. See README for the coefficient law.
/// `snr_db == kNoiseless` disables noise.
SynthesisResult synthesize(const DictionaryPair& dicts, Index sparsity,
                           double gamma_target, double snr_db,
                           std::uint64_t seed);

}  // namespace jointsparse

#endif  // JOINTSPARSE_CORE_MODEL_HPP
