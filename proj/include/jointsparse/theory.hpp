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

// Worst-case recovery guarantee for the joint program and the cone
// inequality satisfied by its error vector.

#ifndef JOINTSPARSE_THEORY_HPP
#define JOINTSPARSE_THEORY_HPP

#include "jointsparse/core_model.hpp"

namespace jointsparse {

struct BoundInputs {
  double eta = 0.0;       // noise level relative to f0, in [0, 1)
  double gamma = 0.0;     // coefficient dissimilarity, in [0, 1]
  Index t0 = 1;           // support size
  Index m = 1;            // restricted isometry order M
  double delta_m = 0.0;
  double delta_m_t0 = 0.0;  // delta of order M + t0
  double f0 = 1.0;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

/// sqrt(M (1 - delta_{M+t0})) - sqrt(t0 (1 + delta_M)). The bound is only
/// meaningful when this is positive.
double bound_denominator(const BoundInputs& in);

/// (4 eta sqrt(M) + gamma t0 sqrt(1 + delta_M)) / denominator.
/// Throws DegenerateDenominator when the denominator is not positive.
double constant_C(const BoundInputs& in);

/// Upper bound on the squared coefficient error |[a0; b0] - [a*; b*]|^2:
/// ((t0 / M) (C + gamma sqrt(t0))^2 + C^2) f0^2.
double recovery_bound(const BoundInputs& in);

/// Fills delta_m and delta_m_t0 from the block dictionary [PhiI 0; 0 PhiD]
/// using the given estimate mode. The remaining fields are copied from base.
BoundInputs bound_inputs(const DictionaryPair& dicts, const BoundInputs& base,
                         DeltaMode mode);

/// |h_{T0^c}|_1 - |h_{T0}|_1 - gamma u |T0| for h of length 2N, with T0
/// applied to both halves. Nonpositive iff the cone inequality holds.
double cone_constraint_check(const Vector& h, const IndexSet& support, double gamma,
                             double u);

}  // namespace jointsparse

#endif  // JOINTSPARSE_THEORY_HPP
