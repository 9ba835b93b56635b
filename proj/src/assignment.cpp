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

#include "jointsparse/assignment.hpp"

#include <limits>

#include "jointsparse/errors.hpp"

namespace jointsparse {

std::vector<Eigen::Index> solve_assignment(const Eigen::MatrixXd& cost) {
  using Eigen::Index;
  require(cost.rows() == cost.cols(), ErrorCode::SizeMismatch,
          "solve_assignment: cost matrix must be square");
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based bookkeeping; index 0 is a virtual column holding the row being
  // inserted.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> owner(n + 1, 0), way(n + 1, 0);
  for (Index row = 1; row <= n; ++row) {
    owner[0] = row;
    Index col0 = 0;
    std::vector<double> slack(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const Index r = owner[col0];
      double delta = inf;
      Index col1 = 0;
      for (Index c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double reduced = cost(r - 1, c - 1) - u[r] - v[c];
        if (reduced < slack[c]) {
          slack[c] = reduced;
          way[c] = col0;
        }
        if (slack[c] < delta) {
          delta = slack[c];
          col1 = c;
        }
      }
      for (Index c = 0; c <= n; ++c) {
        if (used[c]) {
          u[owner[c]] += delta;
          v[c] -= delta;
        } else {
          slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    // Augment along the alternating path.
    do {
      const Index prev = way[col0];
      owner[col0] = owner[prev];
      col0 = prev;
    } while (col0 != 0);
  }
  std::vector<Index> assignment(n);
  for (Index c = 1; c <= n; ++c) assignment[owner[c] - 1] = c - 1;
  return assignment;
}

}  // namespace jointsparse
