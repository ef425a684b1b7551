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

#include "smb/instability.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "smb/assignment.h"
#include "smb/error.h"

namespace smb {
namespace {

// Best matching weight among the given agents, by recursion over customers.
double BestWeightOn(const UtilityMatrix& u, const std::vector<int>& customers,
                    std::vector<char>& provider_used,
                    const std::vector<char>& provider_in, size_t k) {
  if (k == customers.size()) return 0.0;
  double best = BestWeightOn(u, customers, provider_used, provider_in, k + 1);
  const int i = customers[k];
  for (int j = 0; j < u.providers(); ++j) {
    if (!provider_in[j] || provider_used[j]) continue;
    provider_used[j] = 1;
    best = std::max(best, u.joint(i, j) + BestWeightOn(u, customers,
                                                       provider_used,
                                                       provider_in, k + 1));
    provider_used[j] = 0;
  }
  return best;
}

struct SurplusGraph {
  AgentVector payoff;
  AgentVector ir_gap;  // max(0, -payoff)
  std::vector<double> weights;
};

SurplusGraph BuildSurplusGraph(const UtilityMatrix& u,
                               const MarketOutcome& outcome) {
  RequireZeroSum(outcome, u.customers(), u.providers());
  SurplusGraph g;
  g.payoff = Payoffs(u, outcome);
  g.ir_gap = AgentVector::Zeros(u.customers(), u.providers());
  for (int i = 0; i < u.customers(); ++i) {
    g.ir_gap.customers[i] = std::max(0.0, -g.payoff.customers[i]);
  }
  for (int j = 0; j < u.providers(); ++j) {
    g.ir_gap.providers[j] = std::max(0.0, -g.payoff.providers[j]);
  }
  // Selecting edge (i, j) earns its surplus but forfeits the IR gaps the two
  // endpoints would otherwise contribute on their own.
  g.weights.resize(static_cast<size_t>(u.customers()) * u.providers());
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      const double surplus =
          u.joint(i, j) - g.payoff.customers[i] - g.payoff.providers[j];
      g.weights[static_cast<size_t>(i) * u.providers() + j] =
          surplus - g.ir_gap.customers[i] - g.ir_gap.providers[j];
    }
  }
  return g;
}

}  // namespace

InstabilityReport SubsetInstability(const UtilityMatrix& u,
                                    const MarketOutcome& outcome) {
  const SurplusGraph g = BuildSurplusGraph(u, outcome);
  const AssignmentSolution sol =
      SolveMaxWeightAssignment(g.weights, u.customers(), u.providers());

  InstabilityReport report;
  report.value = g.ir_gap.Sum() + sol.weight;
  // Witnesses ignore contributions below tolerance so that stable outcomes
  // report empty structures despite rounding.
  report.blocking_matching = Matching(u.customers(), u.providers());
  for (int i = 0; i < u.customers(); ++i) {
    const int j = sol.row_partner[i];
    if (j >= 0 &&
        g.weights[static_cast<size_t>(i) * u.providers() + j] > kTolerance) {
      report.blocking_matching.Add(i, j);
    }
  }
  const Matching& b = report.blocking_matching;
  for (int i = 0; i < u.customers(); ++i) {
    const AgentId a{Side::kCustomer, i};
    if (b.customer_partner(i) != Matching::kUnmatched) {
      report.witness_subset.push_back(a);
    } else if (g.ir_gap.customers[i] > kTolerance) {
      report.witness_subset.push_back(a);
      report.ir_violators.push_back(a);
    }
  }
  for (int j = 0; j < u.providers(); ++j) {
    const AgentId a{Side::kProvider, j};
    if (b.provider_partner(j) != Matching::kUnmatched) {
      report.witness_subset.push_back(a);
    } else if (g.ir_gap.providers[j] > kTolerance) {
      report.witness_subset.push_back(a);
      report.ir_violators.push_back(a);
    }
  }

  // s = IR gap + dual price of the surplus graph, then close any residual
  // floating-point deficit.
  AgentVector s = g.ir_gap;
  for (int i = 0; i < u.customers(); ++i) s.customers[i] += sol.row_prices[i];
  for (int j = 0; j < u.providers(); ++j) s.providers[j] += sol.col_prices[j];
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      const double deficit = u.joint(i, j) -
                             (g.payoff.customers[i] + s.customers[i]) -
                             (g.payoff.providers[j] + s.providers[j]);
      if (deficit > 0.0) s.customers[i] += deficit;
    }
  }
  report.subsidies = std::move(s);
  if (report.value < 0.0) report.value = 0.0;
  return report;
}

double SubsetInstabilityBruteforce(const UtilityMatrix& u,
                                   const MarketOutcome& outcome) {
  RequireZeroSum(outcome, u.customers(), u.providers());
  if (u.agents() > 12) {
    throw Error(ErrorCode::kTooLarge,
                "brute-force instability supports at most 12 agents");
  }
  const AgentVector p = Payoffs(u, outcome);
  const int m = u.customers();
  const int n = u.providers();
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << (m + n)); ++mask) {
    std::vector<int> customers;
    std::vector<char> provider_in(n, 0), provider_used(n, 0);
    double payoff = 0.0;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1u) {
        customers.push_back(i);
        payoff += p.customers[i];
      }
    }
    for (int j = 0; j < n; ++j) {
      if (mask >> (m + j) & 1u) {
        provider_in[j] = 1;
        payoff += p.providers[j];
      }
    }
    const double w = BestWeightOn(u, customers, provider_used, provider_in, 0);
    best = std::max(best, w - payoff);
  }
  return best;
}

SubsidyResult MinStabilizingSubsidy(const UtilityMatrix& u,
                                    const MarketOutcome& outcome) {
  InstabilityReport r = SubsetInstability(u, outcome);
  return SubsidyResult{r.value, std::move(r.subsidies)};
}

bool IsSubsidyStabilizing(const UtilityMatrix& u, const MarketOutcome& outcome,
                          const AgentVector& subsidies) {
  const AgentVector p = Payoffs(u, outcome);
  for (int i = 0; i < u.customers(); ++i) {
    if (subsidies.customers[i] < -kTolerance ||
        p.customers[i] + subsidies.customers[i] < -kTolerance) {
      return false;
    }
  }
  for (int j = 0; j < u.providers(); ++j) {
    if (subsidies.providers[j] < -kTolerance ||
        p.providers[j] + subsidies.providers[j] < -kTolerance) {
      return false;
    }
  }
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      if (p.customers[i] + subsidies.customers[i] + p.providers[j] +
              subsidies.providers[j] <
          u.joint(i, j) - kTolerance) {
        return false;
      }
    }
  }
  return true;
}

CoalitionResult MaxUnhappinessCoalition(const UtilityMatrix& u,
                                        const MarketOutcome& outcome) {
  InstabilityReport r = SubsetInstability(u, outcome);
  const AgentVector p = Payoffs(u, outcome);
  CoalitionResult out;
  out.value = r.value;
  out.coalition = std::move(r.witness_subset);
  out.deviation = MarketOutcome::WithoutTransfers(r.blocking_matching);
  // Each re-matched pair splits its surplus evenly; unmatched members only
  // join when their current payoff is negative, so they gain by leaving.
  for (const auto& [i, j] : r.blocking_matching.pairs()) {
    const double half =
        0.5 * (u.joint(i, j) - p.customers[i] - p.providers[j]);
    out.deviation.transfers.customers[i] =
        p.customers[i] + half - u.customer_utility(i, j);
    out.deviation.transfers.providers[j] =
        -out.deviation.transfers.customers[i];
  }
  return out;
}

double UtilityDifference(const UtilityMatrix& u, const MarketOutcome& outcome) {
  return MaxWeightMatchingWithDuals(u).weight -
         MatchingWeight(u, outcome.matching);
}

bool IsNtuSubsidyFeasible(const UtilityMatrix& u, const Matching& m,
                          const AgentVector& s) {
  std::vector<double> own_c(u.customers()), own_p(u.providers());
  for (int i = 0; i < u.customers(); ++i) {
    own_c[i] = u.utility({Side::kCustomer, i}, m.customer_partner(i));
    if (s.customers[i] < -kTolerance || own_c[i] + s.customers[i] < -kTolerance)
      return false;
  }
  for (int j = 0; j < u.providers(); ++j) {
    own_p[j] = u.utility({Side::kProvider, j}, m.provider_partner(j));
    if (s.providers[j] < -kTolerance || own_p[j] + s.providers[j] < -kTolerance)
      return false;
  }
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      const double gi = u.customer_utility(i, j) - own_c[i] - s.customers[i];
      const double gj = u.provider_utility(j, i) - own_p[j] - s.providers[j];
      if (std::min(gi, gj) > kTolerance) return false;
    }
  }
  return true;
}

NtuInstabilityReport NtuSubsetInstability(const UtilityMatrix& u,
                                          const Matching& m) {
  const int nc = u.customers();
  const int np = u.providers();
  if (nc > 8) {
    throw Error(ErrorCode::kTooLarge,
                "exact NTU instability supports at most 8 customers");
  }
  std::vector<double> own_c(nc), own_p(np), floor_c(nc), floor_p(np);
  for (int i = 0; i < nc; ++i) {
    own_c[i] = u.utility({Side::kCustomer, i}, m.customer_partner(i));
    floor_c[i] = std::max(0.0, -own_c[i]);
  }
  for (int j = 0; j < np; ++j) {
    own_p[j] = u.utility({Side::kProvider, j}, m.provider_partner(j));
    floor_p[j] = std::max(0.0, -own_p[j]);
  }
  // An optimal customer subsidy can always be lowered to the IR floor or to
  // exactly one of its blocking gains.
  std::vector<std::vector<double>> candidates(nc);
  for (int i = 0; i < nc; ++i) {
    candidates[i].push_back(floor_c[i]);
    for (int j = 0; j < np; ++j) {
      const double gain = u.customer_utility(i, j) - own_c[i];
      if (gain > floor_c[i]) candidates[i].push_back(gain);
    }
    std::sort(candidates[i].begin(), candidates[i].end());
    candidates[i].erase(
        std::unique(candidates[i].begin(), candidates[i].end()),
        candidates[i].end());
  }
  double remaining_floor = 0.0;
  for (double f : floor_c) remaining_floor += f;

  // forced[j]: provider j's subsidy implied by customers decided so far.
  std::vector<double> forced = floor_p;
  std::vector<double> chosen(nc, 0.0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_c, best_p;

  std::function<void(int, double, double)> search =
      [&](int k, double spent, double floor_left) {
        double provider_cost = 0.0;
        for (double f : forced) provider_cost += f;
        if (spent + floor_left + provider_cost >= best - 1e-15) return;
        if (k == nc) {
          best = spent + provider_cost;
          best_c = chosen;
          best_p = forced;
          return;
        }
        const std::vector<double> saved = forced;
        for (double c : candidates[k]) {
          chosen[k] = c;
          for (int j = 0; j < np; ++j) {
            if (m.Contains(k, j)) continue;
            if (u.customer_utility(k, j) - own_c[k] - c > 0.0) {
              forced[j] =
                  std::max(forced[j], u.provider_utility(j, k) - own_p[j]);
            }
          }
          search(k + 1, spent + c, floor_left - floor_c[k]);
          forced = saved;
        }
        chosen[k] = 0.0;
      };
  search(0, 0.0, remaining_floor);

  NtuInstabilityReport report;
  report.value = best;
  report.subsidies = AgentVector{best_c, best_p};
  return report;
}

double NtuInstabilityUpperBound(const IntervalTable& intervals,
                                const Matching& m) {
  return intervals.WidthSum(m);
}

}  // namespace smb
