// Copyright 2026 The smb Authors.
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

#include "smb/assignment.h"

#include <algorithm>
#include <cassert>
#include <limits>

namespace smb {
namespace {

// Potentials of a square min-cost assignment. Shortest augmenting path
// variant of the Hungarian method, O(n^3). Indices are 1-based internally;
// column 0 is the virtual source.
struct SquareAssignment {
  std::vector<double> row_potential;  // u, size n + 1
  std::vector<double> col_potential;  // v, size n + 1
  std::vector<int> col_to_row;        // size n + 1
};

SquareAssignment SolveMinCostSquare(const std::vector<double>& cost, int n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  SquareAssignment out;
  out.row_potential.assign(n + 1, 0.0);
  out.col_potential.assign(n + 1, 0.0);
  out.col_to_row.assign(n + 1, 0);
  std::vector<double>& u = out.row_potential;
  std::vector<double>& v = out.col_potential;
  std::vector<int>& p = out.col_to_row;
  std::vector<int> way(n + 1, 0);
  std::vector<double> min_slack(n + 1);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double slack =
            cost[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  return out;
}

}  // namespace

AssignmentSolution SolveMaxWeightAssignment(std::span<const double> weights,
                                            int rows, int cols) {
  assert(static_cast<int>(weights.size()) == rows * cols);
  AssignmentSolution sol;
  sol.row_partner.assign(rows, -1);
  sol.col_partner.assign(cols, -1);
  sol.row_prices.assign(rows, 0.0);
  sol.col_prices.assign(cols, 0.0);
  const int n = std::max(rows, cols);
  if (n == 0 || rows == 0 || cols == 0) return sol;

  // Clamping at zero and padding with zero-weight dummies turns the
  // "at most one partner" program into a square assignment with the same
  // optimum; nonnegative duals make negative edges automatically feasible.
  std::vector<double> cost(static_cast<size_t>(n) * n, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      cost[static_cast<size_t>(r) * n + c] =
          -std::max(0.0, weights[static_cast<size_t>(r) * cols + c]);
    }
  }
  const SquareAssignment sq = SolveMinCostSquare(cost, n);

  // Max-weight duals are the negated min-cost potentials. Every entry of the
  // clamped matrix is >= 0, so min(row) + min(col) >= 0 and a uniform shift
  // makes all prices nonnegative without changing their sum.
  std::vector<double> row_dual(n), col_dual(n);
  for (int i = 0; i < n; ++i) row_dual[i] = -sq.row_potential[i + 1];
  for (int j = 0; j < n; ++j) col_dual[j] = -sq.col_potential[j + 1];
  const double shift = -*std::min_element(row_dual.begin(), row_dual.end());
  for (int i = 0; i < rows; ++i) {
    sol.row_prices[i] = std::max(0.0, row_dual[i] + shift);
  }
  for (int j = 0; j < cols; ++j) {
    sol.col_prices[j] = std::max(0.0, col_dual[j] - shift);
  }

  for (int j = 1; j <= n; ++j) {
    const int r = sq.col_to_row[j] - 1;
    const int c = j - 1;
    if (r >= rows || c >= cols) continue;
    const double w = weights[static_cast<size_t>(r) * cols + c];
    if (w > 0.0) {
      sol.row_partner[r] = c;
      sol.col_partner[c] = r;
      sol.weight += w;
    }
  }
  return sol;
}

}  // namespace smb
