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

#ifndef SMB_VERIFY_H_
#define SMB_VERIFY_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace smb {

struct CheckOutcome {
  std::string name;
  int evaluations = 0;
  int violations = 0;
  // Description of the first violation, if any.
  std::string first_violation;
};

struct VerifyReport {
  std::vector<CheckOutcome> checks;
  double wall_seconds = 0.0;

  bool ok() const {
    for (const CheckOutcome& c : checks) {
      if (c.violations > 0) return false;
    }
    return true;
  }
};

// Cross-checks the solvers against exhaustive oracles and their structural
// properties on `cases` random markets with at most 8 agents.
VerifyReport RunVerification(uint64_t seed, int cases);

// One line per check, then an overall verdict.
void PrintReport(const VerifyReport& report, std::ostream& out);

}  // namespace smb

#endif  // SMB_VERIFY_H_
