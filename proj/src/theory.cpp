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

#include "jointsparse/theory.hpp"

#include <cmath>
#include <vector>

namespace jointsparse {

void BoundInputs::validate() const {
  require(eta >= 0 && eta < 1, ErrorCode::InvalidArgument, "bound: eta must lie in [0, 1)");
  require(gamma >= 0 && gamma <= 1, ErrorCode::InvalidArgument,
          "bound: gamma must lie in [0, 1]");
  require(t0 >= 1 && m >= 1, ErrorCode::InvalidArgument, "bound: t0 and M must be positive");
  require(delta_m >= 0 && delta_m_t0 >= 0, ErrorCode::InvalidArgument,
          "bound: deltas must be nonnegative");
  require(f0 > 0, ErrorCode::InvalidArgument, "bound: f0 must be positive");
}

double bound_denominator(const BoundInputs& in) {
  const double m = static_cast<double>(in.m);
  const double t0 = static_cast<double>(in.t0);
  // Below zero the first square root is undefined; report it as degenerate.
  if (in.delta_m_t0 >= 1.0) return -1.0;
  return std::sqrt(m * (1.0 - in.delta_m_t0)) - std::sqrt(t0 * (1.0 + in.delta_m));
}

double constant_C(const BoundInputs& in) {
  in.validate();
  const double denom = bound_denominator(in);
  require(denom > 0.0, ErrorCode::DegenerateDenominator,
          "recovery bound is vacuous for these isometry constants");
  const double m = static_cast<double>(in.m);
  const double t0 = static_cast<double>(in.t0);
  return (4.0 * in.eta * std::sqrt(m) + in.gamma * t0 * std::sqrt(1.0 + in.delta_m)) / denom;
}

double recovery_bound(const BoundInputs& in) {
  const double c = constant_C(in);
  const double t0 = static_cast<double>(in.t0);
  const double lead = c + in.gamma * std::sqrt(t0);
  return (t0 / static_cast<double>(in.m) * lead * lead + c * c) * in.f0 * in.f0;
}

BoundInputs bound_inputs(const DictionaryPair& dicts, const BoundInputs& base,
                         DeltaMode mode) {
  const Matrix block = block_dict(dicts);
  BoundInputs out = base;
  out.delta_m = delta_estimate(block, base.m, mode).delta;
  out.delta_m_t0 = delta_estimate(block, base.m + base.t0, mode).delta;
  return out;
}

double cone_constraint_check(const Vector& h, const IndexSet& support, double gamma,
                             double u) {
  require(h.size() % 2 == 0, ErrorCode::DimensionMismatch,
          "cone_constraint_check: h must stack two equal halves");
  const Index n = h.size() / 2;
  std::vector<bool> in_support(static_cast<std::size_t>(n), false);
  for (const Index i : support) {
    require(i >= 0 && i < n, ErrorCode::InvalidArgument,
            "cone_constraint_check: support index out of range");
    in_support[static_cast<std::size_t>(i)] = true;
  }
  double on = 0.0, off = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double mass = std::abs(h(i)) + std::abs(h(i + n));
    (in_support[static_cast<std::size_t>(i)] ? on : off) += mass;
  }
  return off - on - gamma * u * static_cast<double>(support.size());
}

}  // namespace jointsparse
