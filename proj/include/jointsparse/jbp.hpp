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

// Joint Basis Pursuit:
//
//   minimize    sum_i x_i
//   subject to  |yI - PhiI a|^2 <= epsI^2
//               |M (yD - PhiD b)|^2 <= epsD^2      (M selects observed depth)
//               |a_i| <= uI x_i,  |b_i| <= uD x_i,  0 <= x_i <= 1
//
// solved with a phase-I start and a log-barrier interior-point method.

#ifndef JOINTSPARSE_JBP_HPP
#define JOINTSPARSE_JBP_HPP

#include <Eigen/Dense>

#include "jointsparse/core_model.hpp"

namespace jointsparse {

struct JbpProblem {
  Vector y_intensity;
  Vector y_depth;
  Matrix phi_intensity;
  Matrix phi_depth;
  double eps_intensity = 0.1;
  double eps_depth = 0.1;
  double u_intensity = 1.0;
  double u_depth = 1.0;
  /// Observed depth entries; empty means every entry is observed.
  MaskVector depth_mask;

  Index atoms() const { return phi_intensity.cols(); }
  void validate() const;
};

/// Builds the problem for a signal pair with eps = eta * f0 and U = f0.
JbpProblem make_problem(const DictionaryPair& dicts, const SignalPair& signals,
                        double eta);

struct SolverOptions {
  double barrier_mu = 10.0;
  double initial_t = 1.0;
  double gap_tol = 1e-8;
  /// Centering stops once the scaled dual residual is below newton_tol and
  /// every product multiplier * slack is within centrality_tol of one.
  double newton_tol = 1e-9;
  double centrality_tol = 1e-3;
  int max_newton = 50;
  int max_outer = 60;
  double feas_tol = 1e-6;
};

enum class SolveStatus { Optimal, Infeasible, MaxIter };

const char* to_string(SolveStatus status);

struct JbpSolution {
  JointCode code;
  double objective = 0.0;
  /// Duality-gap certificate sum_j lambda_j s_j at the returned iterate.
  double gap = 0.0;
  int newton_steps = 0;
  SolveStatus status = SolveStatus::MaxIter;
  /// For Infeasible: how far the best achievable residual exceeds eps. The
  /// code is then all zeros.
  double infeasibility = 0.0;
};

JbpSolution solve(const JbpProblem& problem, const SolverOptions& opts = {});

/// x_i = max(|a_i| / uI, |b_i| / uD): the smallest activity compatible with
/// the coupling constraints. At an optimum of the program it equals x*.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> tighten_activity(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    typename DerivedA::Scalar u_intensity, typename DerivedA::Scalar u_depth) {
  require(u_intensity > 0 && u_depth > 0, ErrorCode::InvalidArgument,
          "tighten_activity: bounds must be positive");
  require(a.size() == b.size(), ErrorCode::DimensionMismatch,
          "tighten_activity: a and b differ in length");
  return (a.array().abs() / u_intensity).max(b.array().abs() / u_depth).matrix();
}

/// Signed worst violation of each constraint family (negative means slack).
struct FeasibilityReport {
  double residual_intensity = 0.0;  // |yI - PhiI a|
  double residual_depth = 0.0;      // masked |yD - PhiD b|
  double ball_violation = 0.0;      // max(res_I - eps_I, res_D - eps_D)
  double box_violation = 0.0;       // max_i max(-x_i, x_i - 1)
  double coupling_violation = 0.0;  // max_i max(|a_i| - uI x_i, |b_i| - uD x_i)
  bool feasible = false;
};

FeasibilityReport check_feasibility(const JbpProblem& problem,
                                    const JointCode& code, double tol);

struct Phase1Result {
  bool feasible = false;
  JointCode start;
  /// Smallest achievable residual minus eps, worst modality. Negative when a
  /// strictly feasible point exists.
  double min_slack = 0.0;
};

/// Strictly feasible starting point or an infeasibility certificate.
Phase1Result phase1_start(const JbpProblem& problem);

}  // namespace jointsparse

#endif  // JOINTSPARSE_JBP_HPP
