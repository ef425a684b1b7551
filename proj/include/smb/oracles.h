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

#ifndef SMB_ORACLES_H_
#define SMB_ORACLES_H_

#include <vector>

#include "smb/market.h"

// Exhaustive reference implementations. Exponential time; used by the test
// suite and by `smb verify` to cross-check the fast solvers.
namespace smb::oracle {

// Every matching of a customers x providers market, including the empty one.
std::vector<Matching> AllMatchings(int customers, int providers);

// Largest weight over all matchings.
double BestMatchingWeight(const UtilityMatrix& u);

// Largest weight over all matchings different from `best`.
double SecondBestMatchingWeight(const UtilityMatrix& u, const Matching& best);

// Largest coalition gain over all coalitions and internal re-matchings with
// zero-sum transfers that leave every member at least as well off.
double MaxUnhappiness(const UtilityMatrix& u, const MarketOutcome& outcome);

// NTU Subset Instability by enumerating provider-side subsidy candidates and
// deriving the cheapest compatible customer subsidies.
double NtuInstabilityByProviders(const UtilityMatrix& u, const Matching& m);

}  // namespace smb::oracle

#endif  // SMB_ORACLES_H_
