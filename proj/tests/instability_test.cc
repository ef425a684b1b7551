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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "smb/error.h"
#include "smb/instability.h"
#include "smb/oracles.h"
#include "test_util.h"

namespace smb {
namespace {

using testing::ThreeAgentMarket;
using testing::RandomMarket;
using testing::RandomOutcome;

MarketOutcome ThreeAgentUnstableOutcome() {
  Matching cq(1, 2);
  cq.Add(0, 1);
  MarketOutcome o = MarketOutcome::WithoutTransfers(cq);
  o.transfers.customers[0] = -11.0;
  o.transfers.providers[1] = 11.0;
  return o;
}

MarketOutcome StableOutcome(const UtilityMatrix& u) {
  return OutcomeFromPrices(u, MaxWeightMatchingWithDuals(u));
}

TEST_CASE("three-agent instability") {
  const UtilityMatrix u = ThreeAgentMarket();
  const MarketOutcome o = ThreeAgentUnstableOutcome();
  const InstabilityReport r = SubsetInstability(u, o);
  CHECK(r.value == 3.0);
  const std::vector<AgentId> cp = {{Side::kCustomer, 0}, {Side::kProvider, 0}};
  CHECK(r.witness_subset == cp);
  CHECK(SubsetInstabilityBruteforce(u, o) == doctest::Approx(3.0));
  CHECK(UtilityDifference(u, o) == 2.0);

  const SubsidyResult s = MinStabilizingSubsidy(u, o);
  CHECK(std::abs(s.value - 3.0) < kTolerance);
  CHECK(std::abs(s.subsidies.Sum() - 3.0) < kTolerance);
  CHECK(s.subsidies.providers[1] == 0.0);
  CHECK(IsSubsidyStabilizing(u, o, s.subsidies));

  const CoalitionResult c = MaxUnhappinessCoalition(u, o);
  CHECK(c.value == 3.0);
  CHECK(c.coalition == cp);
}

TEST_CASE("one valid subsidy split for the three-agent example") {
  const UtilityMatrix u = ThreeAgentMarket();
  const MarketOutcome o = ThreeAgentUnstableOutcome();
  AgentVector s = AgentVector::Zeros(1, 2);
  s.customers[0] = 2.0;
  s.providers[0] = 1.0;
  CHECK(IsSubsidyStabilizing(u, o, s));
  s.providers[0] = 0.5;
  CHECK_FALSE(IsSubsidyStabilizing(u, o, s));
}

TEST_CASE("stable outcome scores zero") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const MarketOutcome o = StableOutcome(u);
    const InstabilityReport r = SubsetInstability(u, o);
    CHECK(r.value < kTolerance);
    CHECK(r.subsidies.Sum() < kTolerance);
    CHECK(MaxUnhappinessCoalition(u, o).coalition.empty());
    CHECK(UtilityDifference(u, o) < kTolerance);
  }
}

TEST_CASE("non-zero-sum transfers are rejected") {
  const UtilityMatrix u = ThreeAgentMarket();
  MarketOutcome o = ThreeAgentUnstableOutcome();
  o.transfers.providers[1] = 10.0;
  CHECK_THROWS_AS(SubsetInstability(u, o), Error);
  CHECK_THROWS_AS(SubsetInstabilityBruteforce(u, o), Error);
}

TEST_CASE("brute force guards its size") {
  const UtilityMatrix u(7, 6);
  try {
    SubsetInstabilityBruteforce(u, MarketOutcome::WithoutTransfers(Matching(7, 6)));
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLarge);
  }
}

TEST_CASE("three formulations agree with brute force") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const MarketOutcome o = RandomOutcome(rng, m, n);
    const InstabilityReport r = SubsetInstability(u, o);
    const double brute = SubsetInstabilityBruteforce(u, o);
    CHECK(std::abs(r.value - brute) < kTolerance);
    CHECK(std::abs(r.subsidies.Sum() - r.value) < kTolerance);
    CHECK(IsSubsidyStabilizing(u, o, r.subsidies));
    CHECK(std::abs(oracle::MaxUnhappiness(u, o) - r.value) < kTolerance);

    // The witness subset attains the value.
    std::vector<int> cs, ps;
    double payoff = 0.0;
    const AgentVector p = Payoffs(u, o);
    for (const AgentId& a : r.witness_subset) {
      (a.side == Side::kCustomer ? cs : ps).push_back(a.index);
      payoff += p.at(a);
    }
    const UtilityMatrix sub = u.Restrict(cs, ps);
    CHECK(std::abs(oracle::BestMatchingWeight(sub) - payoff - r.value) <
          kTolerance);

    // The coalition deviation is zero-sum and nobody loses.
    const CoalitionResult c = MaxUnhappinessCoalition(u, o);
    CHECK(c.deviation.IsZeroSum());
    const AgentVector q = Payoffs(u, c.deviation);
    double gain = 0.0;
    for (const AgentId& a : c.coalition) {
      CHECK(q.at(a) >= p.at(a) - kTolerance);
      gain += q.at(a) - p.at(a);
    }
    CHECK(std::abs(gain - c.value) < kTolerance);
  }
}

TEST_CASE("zero exactly when stable") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const MarketOutcome o =
        trial % 2 == 0 ? RandomOutcome(rng, m, n) : StableOutcome(u);
    const double v = SubsetInstability(u, o).value;
    CHECK(v >= 0.0);
    CHECK((v < kTolerance) == IsStableTu(u, o));
  }
}

TEST_CASE("lipschitz in utilities") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const MarketOutcome o = RandomOutcome(rng, m, n);
    UtilityMatrix v = u;
    double bound = 0.0;
    for (int i = 0; i < m; ++i) {
      const double delta = 0.1 * std::abs(unit(rng));
      for (int j = 0; j < n; ++j) {
        v.set_customer_utility(i, j, u.customer_utility(i, j) + delta * unit(rng));
      }
      bound += 2.0 * delta;
    }
    for (int j = 0; j < n; ++j) {
      const double delta = 0.1 * std::abs(unit(rng));
      for (int i = 0; i < m; ++i) {
        v.set_provider_utility(j, i, u.provider_utility(j, i) + delta * unit(rng));
      }
      bound += 2.0 * delta;
    }
    CHECK(std::abs(SubsetInstability(u, o).value -
                   SubsetInstability(v, o).value) <= bound + kTolerance);
    CHECK(std::abs(NtuSubsetInstability(u, o.matching).value -
                   NtuSubsetInstability(v, o.matching).value) <=
          bound + kTolerance);
  }
}

TEST_CASE("utility difference lower-bounds instability") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const MarketOutcome o = RandomOutcome(rng, m, n);
    CHECK(UtilityDifference(u, o) <= SubsetInstability(u, o).value + kTolerance);
  }
}

TEST_CASE("optimal matching has zero utility difference") {
  std::mt19937_64 rng(26);
  const UtilityMatrix u = RandomMarket(rng, 3, 4);
  MarketOutcome o =
      MarketOutcome::WithoutTransfers(MaxWeightMatchingWithDuals(u).matching);
  for (const auto& [i, j] : o.matching.pairs()) {
    o.transfers.customers[i] = 5.0;
    o.transfers.providers[j] = -5.0;
  }
  CHECK(std::abs(UtilityDifference(u, o)) < kTolerance);
}

TEST_CASE("ntu stable matching scores zero") {
  const UtilityMatrix u = UtilityMatrix::FromRows({{0.1, 0.2}}, {{1.0}, {0.5}});
  Matching mw2(1, 2);
  mw2.Add(0, 1);
  CHECK(NtuSubsetInstability(u, mw2).value == 0.0);
}

TEST_CASE("ntu example picks the cheaper side") {
  const UtilityMatrix u = UtilityMatrix::FromRows({{0.1, 0.2}}, {{1.0}, {0.5}});
  Matching mw1(1, 2);
  mw1.Add(0, 0);
  const NtuInstabilityReport r = NtuSubsetInstability(u, mw1);
  CHECK(r.value == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.subsidies.customers[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(IsNtuSubsidyFeasible(u, mw1, r.subsidies));
  CHECK(std::abs(oracle::NtuInstabilityByProviders(u, mw1) - r.value) <
        kTolerance);
}

TEST_CASE("ntu single blocked pair") {
  for (const auto& [alpha, beta] :
       std::vector<std::pair<double, double>>{{0.3, 0.7}, {0.6, 0.2}}) {
    UtilityMatrix u = UtilityMatrix::FromRows({{alpha}}, {{beta}});
    const NtuInstabilityReport r = NtuSubsetInstability(u, Matching(1, 1));
    CHECK(r.value == doctest::Approx(std::min(alpha, beta)).epsilon(1e-12));
  }
}

TEST_CASE("ntu exact solver matches provider enumeration") {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 150; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 9);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const Matching x = RandomOutcome(rng, m, n).matching;
    const NtuInstabilityReport r = NtuSubsetInstability(u, x);
    CHECK(std::abs(r.value - oracle::NtuInstabilityByProviders(u, x)) <
          kTolerance);
    CHECK(std::abs(r.subsidies.Sum() - r.value) < kTolerance);
    CHECK(IsNtuSubsidyFeasible(u, x, r.subsidies));
    CHECK((r.value < kTolerance) == IsStableNtu(u, x));
  }
}

TEST_CASE("ntu guard") {
  try {
    NtuSubsetInstability(UtilityMatrix(9, 2), Matching(9, 2));
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLarge);
  }
}

TEST_CASE("ntu width bound arithmetic") {
  IntervalTable t(2, 2);
  Matching x(2, 2);
  CHECK(NtuInstabilityUpperBound(t, x) == 0.0);
  x.Add(0, 1);
  CHECK(NtuInstabilityUpperBound(t, x) == 4.0);
  t.customer_view(0, 1) = {0.1, 0.4};
  t.provider_view(1, 0) = {-0.2, 0.0};
  CHECK(NtuInstabilityUpperBound(t, x) == doctest::Approx(0.5));
  x.Add(1, 0);
  CHECK(NtuInstabilityUpperBound(t, x) == doctest::Approx(4.5));
}

TEST_CASE("ntu width bound covers exact value") {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> w(0.0, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    IntervalTable t(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const double a = w(rng), b = w(rng);
        t.customer_view(i, j) = {u.customer_utility(i, j) - a,
                                 u.customer_utility(i, j) + b};
        const double c = w(rng), d = w(rng);
        t.provider_view(j, i) = {u.provider_utility(j, i) - c,
                                 u.provider_utility(j, i) + d};
      }
    }
    // Customer-proposing deferred acceptance on the upper endpoints.
    const UtilityMatrix ucb = t.Upper();
    Matching x(m, n);
    std::vector<int> next(m, 0);
    std::vector<std::vector<int>> order(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) order[i].push_back(j);
      std::stable_sort(order[i].begin(), order[i].end(), [&](int a, int b) {
        return ucb.customer_utility(i, a) > ucb.customer_utility(i, b);
      });
    }
    bool moved = true;
    while (moved) {
      moved = false;
      for (int i = 0; i < m; ++i) {
        while (x.customer_partner(i) == Matching::kUnmatched && next[i] < n) {
          const int j = order[i][next[i]++];
          if (ucb.customer_utility(i, j) < 0 || ucb.provider_utility(j, i) < 0)
            continue;
          const int holder = x.provider_partner(j);
          if (holder == Matching::kUnmatched) {
            x.Add(i, j);
            moved = true;
          } else if (ucb.provider_utility(j, i) >
                     ucb.provider_utility(j, holder)) {
            x.Remove(holder);
            x.Add(i, j);
            moved = true;
          }
        }
      }
    }
    REQUIRE(IsStableNtu(ucb, x));
    CHECK(NtuSubsetInstability(u, x).value <=
          NtuInstabilityUpperBound(t, x) + kTolerance);
  }
}

}  // namespace
}  // namespace smb
