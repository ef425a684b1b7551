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

#include <cmath>
#include <random>

#include "smb/error.h"
#include "smb/market.h"
#include "smb/oracles.h"
#include "test_util.h"

namespace smb {
namespace {

using testing::ThreeAgentMarket;
using testing::RandomMarket;

TEST_CASE("three-agent best matching") {
  const UtilityMatrix u = ThreeAgentMarket(12.0);
  const PrimalDual pd = MaxWeightMatchingWithDuals(u);
  CHECK(pd.matching.size() == 1);
  CHECK(pd.matching.Contains(0, 0));
  CHECK(pd.weight == doctest::Approx(4.0 / 12.0).epsilon(1e-12));
  CHECK(std::abs(pd.prices.Sum() - pd.weight) < kTolerance);
}

TEST_CASE("scale equivariance") {
  const PrimalDual raw = MaxWeightMatchingWithDuals(ThreeAgentMarket());
  const PrimalDual scaled = MaxWeightMatchingWithDuals(ThreeAgentMarket(12.0));
  CHECK(raw.matching == scaled.matching);
  CHECK(std::abs(raw.weight - 12.0 * scaled.weight) < kTolerance);
}

TEST_CASE("negative pair stays unmatched") {
  const UtilityMatrix u = UtilityMatrix::FromRows({{0.3}}, {{-0.5}});
  const PrimalDual pd = MaxWeightMatchingWithDuals(u);
  CHECK(pd.matching.empty());
  CHECK(pd.prices.customers[0] == 0.0);
  CHECK(pd.prices.providers[0] == 0.0);
}

TEST_CASE("empty market") {
  const UtilityMatrix u(0, 0);
  const PrimalDual pd = MaxWeightMatchingWithDuals(u);
  CHECK(pd.matching.empty());
  CHECK(pd.weight == 0.0);
  CHECK(IsStableTu(u, MarketOutcome::WithoutTransfers(pd.matching)));
  CHECK_THROWS_AS(SecondBestMatching(u, pd.matching), Error);
}

TEST_CASE("one-sided market has no alternative") {
  const UtilityMatrix u(3, 0);
  try {
    SecondBestMatching(u, Matching(3, 0));
    FAIL("expected NoAlternative");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoAlternative);
  }
}

TEST_CASE("matching rejects reused agents") {
  Matching m(2, 2);
  m.Add(0, 1);
  CHECK_THROWS_AS(m.Add(1, 1), Error);
  CHECK_THROWS_AS(m.Add(0, 0), Error);
  CHECK_THROWS_AS(m.Add(2, 0), Error);
}

TEST_CASE("three-agent second best") {
  const UtilityMatrix u = ThreeAgentMarket(12.0);
  const PrimalDual pd = MaxWeightMatchingWithDuals(u);
  const WeightedMatching second = SecondBestMatching(u, pd.matching);
  CHECK(second.matching.Contains(0, 1));
  CHECK(second.weight == doctest::Approx(2.0 / 12.0).epsilon(1e-12));
  CHECK(pd.weight - second.weight ==
        doctest::Approx(2.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("single positive pair second best is empty") {
  const UtilityMatrix u = UtilityMatrix::FromRows({{0.4}}, {{0.2}});
  const PrimalDual pd = MaxWeightMatchingWithDuals(u);
  const WeightedMatching second = SecondBestMatching(u, pd.matching);
  CHECK(second.matching.empty());
  CHECK(pd.weight - second.weight == doctest::Approx(0.6));
}

TEST_CASE("random 4x4 agrees with enumeration") {
  std::mt19937_64 rng(11);
  CHECK(oracle::AllMatchings(4, 4).size() == 209);
  for (int trial = 0; trial < 100; ++trial) {
    const UtilityMatrix u = RandomMarket(rng, 4, 4);
    const PrimalDual pd = MaxWeightMatchingWithDuals(u);
    CHECK(std::abs(pd.weight - oracle::BestMatchingWeight(u)) < kTolerance);
    CHECK(std::abs(MatchingWeight(u, pd.matching) - pd.weight) < kTolerance);
    const WeightedMatching second = SecondBestMatching(u, pd.matching);
    CHECK(second.matching != pd.matching);
    CHECK(std::abs(second.weight -
                   oracle::SecondBestMatchingWeight(u, pd.matching)) <
          kTolerance);
  }
}

TEST_CASE("duals are feasible and complementary") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const PrimalDual pd = MaxWeightMatchingWithDuals(u);
    CHECK(std::abs(pd.weight - pd.prices.Sum()) < kTolerance);
    for (int i = 0; i < m; ++i) {
      CHECK(pd.prices.customers[i] >= 0.0);
      if (pd.matching.customer_partner(i) == Matching::kUnmatched) {
        CHECK(pd.prices.customers[i] < kTolerance);
      }
      for (int j = 0; j < n; ++j) {
        CHECK(pd.prices.customers[i] + pd.prices.providers[j] >=
              u.joint(i, j) - kTolerance);
      }
    }
    for (const auto& [i, j] : pd.matching.pairs()) {
      CHECK(std::abs(pd.prices.customers[i] + pd.prices.providers[j] -
                     u.joint(i, j)) < kTolerance);
    }
    const MarketOutcome outcome = OutcomeFromPrices(u, pd);
    CHECK(outcome.IsZeroSum());
    CHECK(IsStableTu(u, outcome));
  }
}

TEST_CASE("stable outcomes have optimal weight") {
  std::mt19937_64 rng(13);
  int stable_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const double best = oracle::BestMatchingWeight(u);
    const PrimalDual pd = MaxWeightMatchingWithDuals(u);
    // Every matching paired with the optimal prices; only optimal ones can
    // be stable.
    for (const Matching& x : oracle::AllMatchings(m, n)) {
      MarketOutcome o = MarketOutcome::WithoutTransfers(x);
      for (const auto& [i, j] : x.pairs()) {
        o.transfers.customers[i] =
            pd.prices.customers[i] - u.customer_utility(i, j);
        o.transfers.providers[j] = -o.transfers.customers[i];
      }
      if (IsStableTu(u, o)) {
        ++stable_seen;
        CHECK(std::abs(MatchingWeight(u, x) - best) < kTolerance);
      }
    }
  }
  CHECK(stable_seen >= 200);
}

TEST_CASE("second best dominates every other matching") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [m, n] = testing::RandomSides(rng, 8);
    const UtilityMatrix u = RandomMarket(rng, m, n);
    const PrimalDual pd = MaxWeightMatchingWithDuals(u);
    const WeightedMatching second = SecondBestMatching(u, pd.matching);
    CHECK(second.weight <= pd.weight + kTolerance);
    for (const Matching& x : oracle::AllMatchings(m, n)) {
      if (x == pd.matching) continue;
      CHECK(MatchingWeight(u, x) <= second.weight + kTolerance);
    }
  }
}

TEST_CASE("three-agent stability") {
  const UtilityMatrix u = ThreeAgentMarket();
  Matching cp(1, 2);
  cp.Add(0, 0);
  MarketOutcome good = MarketOutcome::WithoutTransfers(cp);
  good.transfers.customers[0] = -6.0;
  good.transfers.providers[0] = 6.0;
  CHECK(IsStableTu(u, good, 0.0));

  Matching cq(1, 2);
  cq.Add(0, 1);
  MarketOutcome bad = MarketOutcome::WithoutTransfers(cq);
  bad.transfers.customers[0] = -11.0;
  bad.transfers.providers[1] = 11.0;
  CHECK_FALSE(IsStableTu(u, bad, 0.0));
  // The blocking pair (C, P) gains 3 in total, so eps = 1.5 absorbs it.
  CHECK(IsStableTu(u, bad, 1.5));
  CHECK_FALSE(IsStableTu(u, bad, 1.4));
}

TEST_CASE("stability rejects non-zero-sum transfers") {
  const UtilityMatrix u = ThreeAgentMarket();
  Matching cp(1, 2);
  cp.Add(0, 0);
  MarketOutcome o = MarketOutcome::WithoutTransfers(cp);
  o.transfers.customers[0] = -6.0;
  o.transfers.providers[0] = 5.0;
  try {
    IsStableTu(u, o);
    FAIL("expected InvalidOutcome");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidOutcome);
  }
  CHECK(IsEpsilonStable(u, o, 1.0));
}

TEST_CASE("ntu stability example") {
  // One man, two women.
  const UtilityMatrix u = UtilityMatrix::FromRows({{0.1, 0.2}}, {{1.0}, {0.5}});
  Matching mw2(1, 2);
  mw2.Add(0, 1);
  CHECK(IsStableNtu(u, mw2));
  Matching mw1(1, 2);
  mw1.Add(0, 0);
  CHECK_FALSE(IsStableNtu(u, mw1));
}

TEST_CASE("ntu empty matching with negative utilities") {
  const UtilityMatrix u =
      UtilityMatrix::FromRows({{-0.1, -0.2}, {-0.3, -0.4}},
                              {{-0.5, -0.6}, {-0.7, -0.8}});
  CHECK(IsStableNtu(u, Matching(2, 2)));
}

}  // namespace
}  // namespace smb
