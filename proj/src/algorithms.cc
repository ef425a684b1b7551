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

#include "smb/algorithms.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "smb/error.h"

namespace smb {
namespace {

// Lifts a matching of the arrived sub-market back to full indices.
Matching Lift(const Matching& sub, const Arrivals& arrivals, int customers,
              int providers) {
  Matching full(customers, providers);
  for (const auto& [a, b] : sub.pairs()) {
    full.Add(arrivals.customers[a], arrivals.providers[b]);
  }
  return full;
}

// Transfers p_a - u_a(mu(a)) in full indices; the provider side mirrors the
// customer side so that the result is exactly zero-sum.
MarketOutcome PricedOutcome(const UtilityMatrix& sub, const Matching& matching,
                            const AgentVector& prices,
                            const Arrivals& arrivals, int customers,
                            int providers) {
  MarketOutcome out = MarketOutcome::WithoutTransfers(
      Lift(matching, arrivals, customers, providers));
  for (const auto& [a, b] : matching.pairs()) {
    const double tau = prices.customers[a] - sub.customer_utility(a, b);
    out.transfers.customers[arrivals.customers[a]] = tau;
    out.transfers.providers[arrivals.providers[b]] = -tau;
  }
  return out;
}

UtilityMatrix ArrivedUpper(const IntervalTable& intervals,
                           const Arrivals& arrivals) {
  return intervals.Upper().Restrict(arrivals.customers, arrivals.providers);
}

}  // namespace

MarketOutcome ComputeMatch(const IntervalTable& intervals,
                           const Arrivals& arrivals) {
  const UtilityMatrix sub = ArrivedUpper(intervals, arrivals);
  const PrimalDual pd = MaxWeightMatchingWithDuals(sub);
  return PricedOutcome(sub, pd.matching, pd.prices, arrivals,
                       intervals.customers(), intervals.providers());
}

PrimeResult ComputeMatchPrime(const IntervalTable& intervals,
                              const IntervalTable& expanded,
                              const Arrivals& arrivals) {
  const int m = intervals.customers();
  const int n = intervals.providers();
  const UtilityMatrix sub = ArrivedUpper(intervals, arrivals);
  const PrimalDual best = MaxWeightMatchingWithDuals(sub);

  PrimeResult result;
  auto fallback = [&]() {
    result.outcome = PricedOutcome(sub, best.matching, best.prices, arrivals,
                                   m, n);
    result.branch = PrimeBranch::kFallback;
    return result;
  };
  WeightedMatching second;
  try {
    second = SecondBestMatching(sub, best.matching);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoAlternative) throw;
    return fallback();
  }
  result.gap = MatchingWeight(sub, best.matching) - second.weight;
  if (result.gap <= kTolerance) return fallback();

  // Shaving gap / |A| off every matched entry keeps X* optimal; lifting the
  // resulting duals back by the same amount gives optimal prices for the UCB
  // market with slack on every non-matched edge.
  const double shave = result.gap / arrivals.size();
  UtilityMatrix shaved = sub;
  for (const auto& [a, b] : best.matching.pairs()) {
    shaved.set_customer_utility(a, b, sub.customer_utility(a, b) - shave);
    shaved.set_provider_utility(b, a, sub.provider_utility(b, a) - shave);
  }
  AgentVector lifted = MaxWeightMatchingWithDuals(shaved).prices;
  for (const auto& [a, b] : best.matching.pairs()) {
    lifted.customers[a] += shave;
    lifted.providers[b] += shave;
  }

  const UtilityMatrix sub2 = ArrivedUpper(expanded, arrivals);
  const PrimalDual pd2 = MaxWeightMatchingWithDuals(sub2);
  if (pd2.matching != best.matching) {
    result.outcome =
        PricedOutcome(sub2, pd2.matching, pd2.prices, arrivals, m, n);
    result.branch = PrimeBranch::kExpanded;
  } else {
    result.outcome =
        PricedOutcome(sub, best.matching, lifted, arrivals, m, n);
    result.branch = PrimeBranch::kLifted;
  }
  result.best = Lift(best.matching, arrivals, m, n);
  result.lifted_prices = AgentVector::Zeros(m, n);
  for (size_t a = 0; a < arrivals.customers.size(); ++a) {
    result.lifted_prices.customers[arrivals.customers[a]] =
        lifted.customers[a];
  }
  for (size_t b = 0; b < arrivals.providers.size(); ++b) {
    result.lifted_prices.providers[arrivals.providers[b]] =
        lifted.providers[b];
  }
  return result;
}

Matching ComputeMatchNtu(const IntervalTable& intervals,
                         const Arrivals& arrivals) {
  const UtilityMatrix u = ArrivedUpper(intervals, arrivals);
  const int m = u.customers();
  const int n = u.providers();
  std::vector<std::vector<int>> prefs(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (u.customer_utility(i, j) >= 0.0) prefs[i].push_back(j);
    }
    std::stable_sort(prefs[i].begin(), prefs[i].end(), [&](int a, int b) {
      return u.customer_utility(i, a) > u.customer_utility(i, b);
    });
  }
  Matching sub(m, n);
  std::vector<size_t> next(m, 0);
  std::vector<int> free_customers;
  for (int i = m - 1; i >= 0; --i) free_customers.push_back(i);
  while (!free_customers.empty()) {
    const int i = free_customers.back();
    if (next[i] == prefs[i].size()) {
      free_customers.pop_back();
      continue;
    }
    const int j = prefs[i][next[i]++];
    if (u.provider_utility(j, i) < 0.0) continue;
    const int holder = sub.provider_partner(j);
    if (holder == Matching::kUnmatched) {
      sub.Add(i, j);
      free_customers.pop_back();
    } else if (u.provider_utility(j, i) > u.provider_utility(j, holder)) {
      sub.Remove(holder);
      sub.Add(i, j);
      free_customers.back() = holder;
    }
  }
  return Lift(sub, arrivals, intervals.customers(), intervals.providers());
}

std::string_view PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kMatchUcb:
      return "match_ucb";
    case PolicyKind::kMatchTypedUcb:
      return "match_typed_ucb";
    case PolicyKind::kMatchLinUcb:
      return "match_lin_ucb";
    case PolicyKind::kMatchUcbPrime:
      return "match_ucb_prime";
    case PolicyKind::kMatchNtuUcb:
      return "match_ntu_ucb";
    case PolicyKind::kEtc:
      return "etc";
    case PolicyKind::kRevenueFrictions:
      return "revenue_frictions";
  }
  return "unknown";
}

PolicyKind ParsePolicyKind(std::string_view name) {
  for (PolicyKind k :
       {PolicyKind::kMatchUcb, PolicyKind::kMatchTypedUcb,
        PolicyKind::kMatchLinUcb, PolicyKind::kMatchUcbPrime,
        PolicyKind::kMatchNtuUcb, PolicyKind::kEtc,
        PolicyKind::kRevenueFrictions}) {
    if (PolicyKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kConfigError,
              "unknown policy kind '" + std::string(name) + "'");
}

Policy::Policy(PolicyConfig config, ConfidenceSets confidence, int horizon)
    : config_(config), confidence_(std::move(confidence)), horizon_(horizon) {
  if (horizon_ < 1) throw Error(ErrorCode::kConfigError, "horizon must be >= 1");
  const ConfidenceMode mode = confidence_.mode();
  bool compatible = false;
  switch (config_.kind) {
    case PolicyKind::kMatchTypedUcb:
      compatible = mode == ConfidenceMode::kTyped;
      break;
    case PolicyKind::kMatchLinUcb:
      compatible = mode == ConfidenceMode::kLinear;
      break;
    case PolicyKind::kMatchNtuUcb:
      compatible = mode != ConfidenceMode::kLinear;
      break;
    default:
      compatible = mode == ConfidenceMode::kUnstructured;
  }
  if (!compatible) {
    throw Error(ErrorCode::kConfigError,
                "policy " + std::string(PolicyKindName(config_.kind)) +
                    " does not support this preference class");
  }
  if (config_.kind == PolicyKind::kRevenueFrictions && !(config_.epsilon > 0)) {
    throw Error(ErrorCode::kConfigError, "epsilon must be positive");
  }
  if (config_.kind == PolicyKind::kEtc) {
    if (config_.etc_budget < 0) {
      throw Error(ErrorCode::kConfigError, "etc_budget must be >= 0");
    }
    const double agents = confidence_.agents();
    etc_budget_ = config_.etc_budget > 0
                      ? config_.etc_budget
                      : static_cast<int>(std::ceil(
                            std::pow(horizon_ / agents, 2.0 / 3.0) *
                            std::cbrt(std::log(agents * horizon_))));
    etc_pulls_.assign(
        static_cast<size_t>(confidence_.customers()) * confidence_.providers(),
        0);
  }
}

bool Policy::ExplorationMatching(const Arrivals& arrivals,
                                 Matching& out) const {
  std::vector<std::tuple<int, int, int>> pending;
  for (int i : arrivals.customers) {
    for (int j : arrivals.providers) {
      const int pulls = etc_pulls_[static_cast<size_t>(i) * confidence_.providers() + j];
      if (pulls < etc_budget_) pending.emplace_back(pulls, i, j);
    }
  }
  if (pending.empty()) return false;
  std::sort(pending.begin(), pending.end());
  out = Matching(confidence_.customers(), confidence_.providers());
  for (const auto& [pulls, i, j] : pending) {
    if (out.customer_partner(i) == Matching::kUnmatched &&
        out.provider_partner(j) == Matching::kUnmatched) {
      out.Add(i, j);
    }
  }
  return true;
}

RoundDecision Policy::Step(const Arrivals& arrivals,
                           FeedbackChannel& channel) {
  ++round_;
  RoundDecision d;
  d.intervals = confidence_.Snapshot();
  bool learn = true;

  switch (config_.kind) {
    case PolicyKind::kMatchUcb:
    case PolicyKind::kMatchTypedUcb:
    case PolicyKind::kMatchLinUcb:
      d.outcome = ComputeMatch(d.intervals, arrivals);
      break;
    case PolicyKind::kMatchUcbPrime: {
      const IntervalTable expanded = d.intervals.Expanded();
      PrimeResult r = ComputeMatchPrime(d.intervals, expanded, arrivals);
      d.outcome = std::move(r.outcome);
      d.branch = r.branch;
      break;
    }
    case PolicyKind::kMatchNtuUcb:
      d.outcome =
          MarketOutcome::WithoutTransfers(ComputeMatchNtu(d.intervals, arrivals));
      break;
    case PolicyKind::kEtc: {
      Matching explore;
      if (ExplorationMatching(arrivals, explore)) {
        d.outcome = MarketOutcome::WithoutTransfers(explore);
        d.exploring = true;
        for (const auto& [i, j] : explore.pairs()) {
          ++etc_pulls_[static_cast<size_t>(i) * confidence_.providers() + j];
        }
      } else {
        d.outcome = ComputeMatch(d.intervals, arrivals);
        learn = false;
      }
      break;
    }
    case PolicyKind::kRevenueFrictions: {
      d.base_outcome = ComputeMatch(d.intervals, arrivals);
      d.outcome = d.base_outcome;
      for (const auto& [i, j] : d.outcome.matching.pairs()) {
        d.outcome.transfers.customers[i] +=
            d.intervals.customer_view(i, j).width() - config_.epsilon;
        d.outcome.transfers.providers[j] +=
            d.intervals.provider_view(j, i).width() - config_.epsilon;
      }
      d.revenue = -d.outcome.transfers.Sum();
      break;
    }
  }
  if (config_.kind != PolicyKind::kRevenueFrictions) d.base_outcome = d.outcome;

  d.width_sum = d.intervals.WidthSum(d.outcome.matching);
  // Outcomes from the expanded branch are stable for the doubled sets, whose
  // widths are twice as large.
  d.certified_bound =
      d.branch == PrimeBranch::kExpanded ? 2.0 * d.width_sum : d.width_sum;

  const std::vector<Observation> feedback = channel.Observe(d.outcome.matching);
  if (static_cast<int>(feedback.size()) != 2 * d.outcome.matching.size()) {
    throw Error(ErrorCode::kProtocolViolation,
                "feedback cardinality does not match the matched set");
  }
  if (learn) {
    confidence_.Update(arrivals, d.outcome.matching, feedback, horizon_);
  }
  return d;
}

}  // namespace smb
