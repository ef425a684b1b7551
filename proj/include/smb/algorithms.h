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

#ifndef SMB_ALGORITHMS_H_
#define SMB_ALGORITHMS_H_

#include <string_view>
#include <vector>

#include "smb/confidence.h"
#include "smb/intervals.h"
#include "smb/market.h"

namespace smb {

// Stable outcome for the upper confidence bounds, solved on the arrived
// agents only: a maximum-weight matching with transfers p_a - ucb_a(mu(a)).
MarketOutcome ComputeMatch(const IntervalTable& intervals,
                           const Arrivals& arrivals);

enum class PrimeBranch {
  // Gap of the UCB market is zero or no alternative matching exists.
  kFallback,
  // X* agrees with the expanded-set optimum; lifted prices p*.
  kLifted,
  // The expanded-set optimum differs; its own prices are used.
  kExpanded,
};

struct PrimeResult {
  MarketOutcome outcome;
  PrimeBranch branch = PrimeBranch::kFallback;
  double gap = 0.0;
  // X* and p* on the arrived sub-market's UCB matrix (full-size vectors;
  // left empty on the fallback branch).
  Matching best;
  AgentVector lifted_prices;
};

// Gap-robust variant: computes (X*, p*) through the gap-perturbed market and
// (X*2, p*2) on `expanded`, then returns the expanded solution whenever the
// two matchings differ.
PrimeResult ComputeMatchPrime(const IntervalTable& intervals,
                              const IntervalTable& expanded,
                              const Arrivals& arrivals);

// Customer-proposing deferred acceptance on the upper confidence bounds.
// Only acceptable partners (ucb >= 0 on both sides) are matched.
Matching ComputeMatchNtu(const IntervalTable& intervals,
                         const Arrivals& arrivals);

enum class PolicyKind {
  kMatchUcb,
  kMatchTypedUcb,
  kMatchLinUcb,
  kMatchUcbPrime,
  kMatchNtuUcb,
  kEtc,
  kRevenueFrictions,
};

std::string_view PolicyKindName(PolicyKind kind);
// Throws Error(kConfigError) on an unknown name.
PolicyKind ParsePolicyKind(std::string_view name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kMatchUcb;
  // Per-agent charge of the revenue policy.
  double epsilon = 0.1;
  // Explorations per pair for ETC; 0 selects
  // ceil((T/|A|)^(2/3) * log(|A| T)^(1/3)).
  int etc_budget = 0;
};

// Produces semi-bandit feedback for a submitted matching.
class FeedbackChannel {
 public:
  virtual ~FeedbackChannel() = default;
  virtual std::vector<Observation> Observe(const Matching& matching) = 0;
};

struct RoundDecision {
  MarketOutcome outcome;
  // Outcome whose UCB stability backs the certificate. Equals `outcome`
  // except for the revenue policy, where it is the zero-sum base outcome.
  MarketOutcome base_outcome;
  // Intervals the decision was computed from.
  IntervalTable intervals;
  double width_sum = 0.0;
  // Upper bound on the instability whenever `intervals` contain the truth.
  double certified_bound = 0.0;
  double revenue = 0.0;
  PrimeBranch branch = PrimeBranch::kFallback;
  bool exploring = false;
};

class Policy {
 public:
  // Throws Error(kConfigError) when the confidence mode does not fit `kind`
  // or the configuration is invalid.
  Policy(PolicyConfig config, ConfidenceSets confidence, int horizon);

  RoundDecision Step(const Arrivals& arrivals, FeedbackChannel& channel);

  const PolicyConfig& config() const { return config_; }
  const ConfidenceSets& confidence() const { return confidence_; }
  int round() const { return round_; }
  int etc_budget() const { return etc_budget_; }

 private:
  bool ExplorationMatching(const Arrivals& arrivals, Matching& out) const;

  PolicyConfig config_;
  ConfidenceSets confidence_;
  int horizon_;
  int round_ = 0;
  int etc_budget_ = 0;
  std::vector<int> etc_pulls_;
};

}  // namespace smb

#endif  // SMB_ALGORITHMS_H_
