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

#ifndef SMB_MARKET_H_
#define SMB_MARKET_H_

#include <compare>
#include <span>
#include <utility>
#include <vector>

namespace smb {

// Absolute tolerance for all equality comparisons on weights, prices and
// instability values.
inline constexpr double kTolerance = 1e-9;

enum class Side { kCustomer, kProvider };

struct AgentId {
  Side side = Side::kCustomer;
  int index = 0;

  friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

// Global utility function of a two-sided market. customer_utility(i, j) is
// u_i(j), provider_utility(j, i) is u_j(i); being unmatched is worth zero.
class UtilityMatrix {
 public:
  UtilityMatrix() = default;
  UtilityMatrix(int customers, int providers);

  // customer_rows is customers x providers, provider_rows is
  // providers x customers.
  static UtilityMatrix FromRows(
      const std::vector<std::vector<double>>& customer_rows,
      const std::vector<std::vector<double>>& provider_rows);

  int customers() const { return customers_; }
  int providers() const { return providers_; }
  int agents() const { return customers_ + providers_; }

  double customer_utility(int i, int j) const {
    return customer_block_[static_cast<size_t>(i) * providers_ + j];
  }
  double provider_utility(int j, int i) const {
    return provider_block_[static_cast<size_t>(j) * customers_ + i];
  }
  void set_customer_utility(int i, int j, double value) {
    customer_block_[static_cast<size_t>(i) * providers_ + j] = value;
  }
  void set_provider_utility(int j, int i, double value) {
    provider_block_[static_cast<size_t>(j) * customers_ + i] = value;
  }

  // u_i(j) + u_j(i), the weight of edge (i, j) in the primal program.
  double joint(int i, int j) const {
    return customer_utility(i, j) + provider_utility(j, i);
  }

  // u_a(partner); partner == a (or an unmatched marker) yields 0.
  double utility(AgentId agent, int partner) const;

  bool InUnitRange() const;

  // Sub-market on the listed customers and providers (in the given order).
  UtilityMatrix Restrict(std::span<const int> customers,
                         std::span<const int> providers) const;

  // Row-major customers x providers matrix of joint weights.
  std::vector<double> JointWeights() const;

  friend bool operator==(const UtilityMatrix&, const UtilityMatrix&) = default;

 private:
  int customers_ = 0;
  int providers_ = 0;
  std::vector<double> customer_block_;
  std::vector<double> provider_block_;
};

// A set of pairwise disjoint (customer, provider) pairs.
class Matching {
 public:
  static constexpr int kUnmatched = -1;

  Matching() = default;
  Matching(int customers, int providers);

  // Throws Error(kInvalidOutcome) when an index is out of range or either
  // agent is already matched.
  void Add(int customer, int provider);
  void Remove(int customer);

  int customers() const { return static_cast<int>(customer_partner_.size()); }
  int providers() const { return static_cast<int>(provider_partner_.size()); }
  int customer_partner(int i) const { return customer_partner_[i]; }
  int provider_partner(int j) const { return provider_partner_[j]; }
  int partner(AgentId agent) const;
  bool Contains(int customer, int provider) const {
    return customer_partner_[customer] == provider;
  }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // Pairs in increasing customer order.
  std::vector<std::pair<int, int>> pairs() const;

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<int> customer_partner_;
  std::vector<int> provider_partner_;
  int size_ = 0;
};

// One real value per agent, split by side.
struct AgentVector {
  std::vector<double> customers;
  std::vector<double> providers;

  static AgentVector Zeros(int customers, int providers);
  double& at(AgentId a) {
    return a.side == Side::kCustomer ? customers[a.index]
                                     : providers[a.index];
  }
  double at(AgentId a) const {
    return a.side == Side::kCustomer ? customers[a.index]
                                     : providers[a.index];
  }
  double Sum() const;

  friend bool operator==(const AgentVector&, const AgentVector&) = default;
};

using DualPrices = AgentVector;

// A matching plus one transfer per agent. TU outcomes are zero-sum; NTU
// outcomes carry all-zero transfers.
struct MarketOutcome {
  Matching matching;
  AgentVector transfers;

  static MarketOutcome WithoutTransfers(const Matching& matching);
  bool IsZeroSum(double tolerance = kTolerance) const;
};

// Throws Error(kInvalidOutcome) unless transfers are sized to the market and
// zero-sum on every pair with zero transfers for unmatched agents.
void RequireZeroSum(const MarketOutcome& outcome, int customers,
                    int providers);

// sum_a u_a(mu(a)).
double MatchingWeight(const UtilityMatrix& u, const Matching& m);

// Net payoff u_a(mu(a)) + tau_a for every agent.
AgentVector Payoffs(const UtilityMatrix& u, const MarketOutcome& outcome);

struct PrimalDual {
  Matching matching;
  DualPrices prices;
  double weight = 0.0;
};

// Maximum-weight matching together with optimal dual prices for
//   min sum(p)  s.t.  p_i + p_j >= u_i(j) + u_j(i),  p >= 0.
// Edges with nonpositive joint weight are never matched. Complementary
// slackness holds: matched pairs are tight and unmatched agents have price 0.
PrimalDual MaxWeightMatchingWithDuals(const UtilityMatrix& u);

// tau_a = p_a - u_a(mu(a)) for matched agents, 0 otherwise.
MarketOutcome OutcomeFromPrices(const UtilityMatrix& u,
                                const PrimalDual& solution);

struct WeightedMatching {
  Matching matching;
  double weight = 0.0;
};

// Best matching different from `best`. Throws Error(kNoAlternative) when the
// market admits only the empty matching.
WeightedMatching SecondBestMatching(const UtilityMatrix& u,
                                    const Matching& best);

// Epsilon-relaxed stability: individual rationality up to -eps and no pair
// whose joint utility exceeds their combined payoff by more than 2 eps.
// Transfers are not required to be zero-sum.
bool IsEpsilonStable(const UtilityMatrix& u, const MarketOutcome& outcome,
                     double eps);

// Stability for matching with transfers. Requires zero-sum transfers.
bool IsStableTu(const UtilityMatrix& u, const MarketOutcome& outcome,
                double eps = 0.0);

// Stability without transfers: individually rational and no pair where both
// sides strictly gain.
bool IsStableNtu(const UtilityMatrix& u, const Matching& m);

// Agents that are present in a round.
struct Arrivals {
  std::vector<int> customers;
  std::vector<int> providers;

  static Arrivals All(int customers, int providers);
  int size() const {
    return static_cast<int>(customers.size() + providers.size());
  }
};

}  // namespace smb

#endif  // SMB_MARKET_H_
