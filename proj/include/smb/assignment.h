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

#ifndef SMB_ASSIGNMENT_H_
#define SMB_ASSIGNMENT_H_

#include <span>
#include <vector>

namespace smb {

// Solution of a rectangular maximum-weight bipartite matching where every
// vertex may stay unmatched.
struct AssignmentSolution {
  std::vector<int> row_partner;  // -1 when the row is unmatched.
  std::vector<int> col_partner;
  std::vector<double> row_prices;
  std::vector<double> col_prices;
  double weight = 0.0;
};

// Maximum-weight matching on a rows x cols weight matrix (row-major).
//
// Edges with weight <= 0 are never reported as matched. The returned prices
// are an optimal solution of the dual program
//   min sum(p)  s.t.  p_r + p_c >= w_rc,  p >= 0,
// taken from the Hungarian potentials of the clamped, zero-padded square
// problem. Entries may be -infinity to forbid an edge.
AssignmentSolution SolveMaxWeightAssignment(std::span<const double> weights,
                                            int rows, int cols);

}  // namespace smb

#endif  // SMB_ASSIGNMENT_H_
