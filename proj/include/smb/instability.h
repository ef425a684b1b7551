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

#ifndef SMB_INSTABILITY_H_
#define SMB_INSTABILITY_H_

#include <vector>

#include "smb/intervals.h"
#include "smb/market.h"

namespace smb {

// Subset Instability of a TU outcome together with its witnesses.
struct InstabilityReport {
  double value = 0.0;
  // Subset attaining the maximum of (best matching on S) - (payoff of S).
  std::vector<AgentId> witness_subset;
  // Minimum stabilizing subsidy; sums to `value`.
  AgentVector subsidies;
  // Blocking structure of the dual program: a partial matching and the set
  // of agents whose individual rationality is violated.
  Matching blocking_matching;
  std::vector<AgentId> ir_violators;
};

// Exact Subset Instability through a single maximum-weight matching on the
// surplus graph. Throws Error(kInvalidOutcome) for non-zero-sum transfers.
InstabilityReport SubsetInstability(const UtilityMatrix& u,
                                    const MarketOutcome& outcome);

// Literal maximization over all agent subsets. Throws Error(kTooLarge) when
// the market has more than 12 agents.
double SubsetInstabilityBruteforce(const UtilityMatrix& u,
                                   const MarketOutcome& outcome);

struct SubsidyResult {
  double value = 0.0;
  AgentVector subsidies;
};

// Cheapest nonnegative subsidy vector s such that payoffs p + s are
// individually rational and admit no blocking pair.
SubsidyResult MinStabilizingSubsidy(const UtilityMatrix& u,
                                    const MarketOutcome& outcome);

// True if payoffs shifted by `subsidies` leave no IR violation or blocking
// pair (up to kTolerance).
bool IsSubsidyStabilizing(const UtilityMatrix& u, const MarketOutcome& outcome,
                          const AgentVector& subsidies);

struct CoalitionResult {
  double value = 0.0;
  std::vector<AgentId> coalition;
  // Re-matching inside the coalition and zero-sum transfers under which no
  // member is worse off than in the original outcome.
  MarketOutcome deviation;
};

CoalitionResult MaxUnhappinessCoalition(const UtilityMatrix& u,
                                        const MarketOutcome& outcome);

// Weight of the best matching minus the weight of the outcome's matching.
double UtilityDifference(const UtilityMatrix& u, const MarketOutcome& outcome);

struct NtuInstabilityReport {
  double value = 0.0;
  AgentVector subsidies;
};

// True if `subsidies` is nonnegative and satisfies the individual
// rationality and disjunctive no-blocking constraints for `m`.
bool IsNtuSubsidyFeasible(const UtilityMatrix& u, const Matching& m,
                          const AgentVector& subsidies);

// Exact NTU Subset Instability by branch and bound over customer subsidy
// candidates. Throws Error(kTooLarge) above 8 customers.
NtuInstabilityReport NtuSubsetInstability(const UtilityMatrix& u,
                                          const Matching& m);

// Sum of interval widths over matched agents. Upper-bounds the NTU
// instability whenever the intervals contain the truth and `m` is stable
// for their upper endpoints.
double NtuInstabilityUpperBound(const IntervalTable& intervals,
                                const Matching& m);

}  // namespace smb

#endif  // SMB_INSTABILITY_H_
