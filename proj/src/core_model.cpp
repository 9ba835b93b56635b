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
#include <string>

namespace jointsparse {

void DictionaryPair::validate() const {
  require(intensity.cols() == depth.cols(), ErrorCode::DimensionMismatch,
          "dictionaries have different atom counts (" +
              std::to_string(intensity.cols()) + " vs " +
              std::to_string(depth.cols()) + ")");
  require(intensity.cols() >= 1, ErrorCode::DimensionMismatch,
          "dictionaries have no atoms");
  for (Index j = 0; j < atoms(); ++j) {
    require(intensity.col(j).norm() > 0.0 && depth.col(j).norm() > 0.0,
            ErrorCode::DimensionMismatch,
            "atom " + std::to_string(j) + " has zero norm");
  }
}

NormalizedPair normalize_pair(const SignalPair& pair) {
  const double ni = pair.intensity.norm();
  const double nd = pair.depth.norm();
  require(ni > 0.0, ErrorCode::ZeroSignal, "intensity signal has zero norm");
  require(nd > 0.0, ErrorCode::ZeroSignal, "depth signal has zero norm");
  NormalizedPair out;
  out.signals.intensity = pair.intensity / ni;
  out.signals.depth = pair.depth / nd;
  out.signals.f0 = 1.0;
  out.scale_intensity = ni;
  out.scale_depth = nd;
  return out;
}

Matrix random_dictionary(Index rows, Index cols, Rng& rng) {
  Matrix m = rng.gaussian(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    double n = m.col(j).norm();
    while (n == 0.0) {
      for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
      n = m.col(j).norm();
    }
    m.col(j) /= n;
  }
  return m;
}

DictionaryPair random_dictionary_pair(Index rows_intensity, Index rows_depth,
                                      Index atoms, std::uint64_t seed) {
  Rng rng(seed, Stream::Dictionary);
  DictionaryPair d;
  d.intensity = random_dictionary(rows_intensity, atoms, rng);
  d.depth = random_dictionary(rows_depth, atoms, rng);
  return d;
}

namespace {

Vector noise_at_snr(const Vector& signal, double snr_db, Rng& rng) {
  Vector noise = Vector::Zero(signal.size());
  if (std::isinf(snr_db) && snr_db > 0) return noise;
  const double signal_norm = signal.norm();
  if (signal_norm == 0.0) return noise;
  for (Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
  const double n = noise.norm();
  if (n == 0.0) return noise;
  // 10 log10(|s|^2 / |e|^2) = snr_db exactly.
  const double target = signal_norm * std::pow(10.0, -snr_db / 20.0);
  return noise * (target / n);
}

}  // namespace

SynthesisResult synthesize(const DictionaryPair& dicts, Index sparsity,
                           double gamma_target, double snr_db,
                           std::uint64_t seed) {
  dicts.validate();
  const Index n_atoms = dicts.atoms();
  require(sparsity >= 1 && sparsity <= n_atoms, ErrorCode::BadSparsity,
          "sparsity " + std::to_string(sparsity) + " outside [1, " +
              std::to_string(n_atoms) + "]");
  require(gamma_target >= 0.0 && gamma_target < 1.0,
          ErrorCode::InvalidArgument, "gamma_target must lie in [0, 1)");

  SynthesisResult out;
  GroundTruth& truth = out.truth;
  Rng support_rng(seed, Stream::Support);
  truth.support = support_rng.sample_without_replacement(n_atoms, sparsity);

  truth.a0 = Vector::Zero(n_atoms);
  truth.b0 = Vector::Zero(n_atoms);
  Rng coef_rng(seed, Stream::Coefficients);
  for (const Index i : truth.support) {
    const double larger = coef_rng.uniform(0.5, 1.0);
    const double ratio = coef_rng.uniform(1.0 - gamma_target, 1.0);
    const bool intensity_larger = coef_rng.coin();
    const double sign_a = coef_rng.coin() ? 1.0 : -1.0;
    const double sign_b = coef_rng.coin() ? 1.0 : -1.0;
    const double smaller = larger * ratio;
    truth.a0(i) = sign_a * (intensity_larger ? larger : smaller);
    truth.b0(i) = sign_b * (intensity_larger ? smaller : larger);
  }
  truth.gamma = gamma_of(truth.a0, truth.b0, truth.support);

  const Vector clean_i = dicts.intensity * truth.a0;
  const Vector clean_d = dicts.depth * truth.b0;
  Rng noise_rng(seed, Stream::Noise);
  truth.noise_intensity = noise_at_snr(clean_i, snr_db, noise_rng);
  truth.noise_depth = noise_at_snr(clean_d, snr_db, noise_rng);

  out.signals.intensity = clean_i + truth.noise_intensity;
  out.signals.depth = clean_d + truth.noise_depth;
  out.signals.f0 = 1.0;
  return out;
}

}  // namespace jointsparse
