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

#ifndef JOINTSPARSE_ASSIGNMENT_HPP
#define JOINTSPARSE_ASSIGNMENT_HPP

#include <vector>

#include <Eigen/Dense>

namespace jointsparse {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Returns column[row]. Throws SizeMismatch for a
/// non-square matrix.
std::vector<Eigen::Index> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace jointsparse

#endif  // JOINTSPARSE_ASSIGNMENT_HPP
