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

// Seeded random streams.
//
// Every consumer of randomness derives its own generator from a master seed,
// a purpose tag and an index (trial, patch, iteration):
//
//   stream_seed(master, tag, index) = splitmix64(splitmix64(master ^ tag) + index)
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Uniform and normal variates are produced here rather than through
// <random> distributions so that streams are identical across standard
// library implementations.

#ifndef JOINTSPARSE_RANDOM_HPP
#define JOINTSPARSE_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace jointsparse {

enum class Stream : std::uint64_t {
  Dictionary = 0x64696374ULL,
  Support = 0x73757070ULL,
  Coefficients = 0x636f6566ULL,
  Noise = 0x6e6f6973ULL,
  Trial = 0x747269ULL,
  Patches = 0x70617463ULL,
  Batch = 0x62617463ULL,
  Mask = 0x6d61736bULL,
  Scene = 0x7363656eULL,
  Init = 0x696e6974ULL,
  Experiment = 0x65787065ULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, Stream tag,
                                    std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ static_cast<std::uint64_t>(tag)) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, Stream tag, std::uint64_t index = 0)
      : engine_(stream_seed(master, tag, index)) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Standard normal via the Box-Muller transform (no cached second draw).
  double normal();

  Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols);

  /// `k` distinct indices from [0, n), drawn uniformly, returned sorted.
  std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n,
                                                       Eigen::Index k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace jointsparse

#endif  // JOINTSPARSE_RANDOM_HPP
