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

#include "smb/environment.h"
#include "smb/error.h"
#include "smb/instability.h"
#include "test_util.h"

namespace smb {
namespace {

TEST_CASE("instances repeat with their seed") {
  for (InstanceClass c : {InstanceClass::kUnstructured, InstanceClass::kTyped,
                          InstanceClass::kLinear}) {
    InstanceSpec spec;
    spec.instance_class = c;
    spec.customers = 4;
    spec.providers = 5;
    const MarketInstance a = GenInstance(spec, 7);
    const MarketInstance b = GenInstance(spec, 7);
    const MarketInstance other = GenInstance(spec, 8);
    CHECK(a.truth == b.truth);
    CHECK_FALSE(a.truth == other.truth);
    CHECK(a.truth.InUnitRange());
  }
}

TEST_CASE("shared instance seed") {
  InstanceSpec spec;
  spec.instance_seed = 99;
  CHECK(GenInstance(spec, 1).truth == GenInstance(spec, 2).truth);
}

TEST_CASE("invalid sizes") {
  InstanceSpec spec;
  spec.customers = 0;
  CHECK_THROWS_AS(GenInstance(spec, 1), Error);
  spec.customers = 2;
  spec.instance_class = InstanceClass::kLinear;
  spec.dim = 0;
  CHECK_THROWS_AS(GenInstance(spec, 1), Error);
}

TEST_CASE("single type means identical rows") {
  InstanceSpec spec;
  spec.instance_class = InstanceClass::kTyped;
  spec.types = 1;
  spec.customers = 4;
  spec.providers = 3;
  const MarketInstance inst = GenInstance(spec, 3);
  for (int i = 1; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(inst.truth.customer_utility(i, j) == inst.truth.customer_utility(0, j));
    }
  }
}

TEST_CASE("typed utilities follow the type tables") {
  InstanceSpec spec;
  spec.instance_class = InstanceClass::kTyped;
  spec.customers = 6;
  spec.providers = 5;
  const MarketInstance inst = GenInstance(spec, 4);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 5; ++j) {
      const int ci = inst.customer_types[i];
      const int cj = inst.provider_types[j];
      CHECK(inst.truth.customer_utility(i, j) == inst.customer_table[ci][cj]);
      CHECK(inst.truth.provider_utility(j, i) == inst.provider_table[cj][ci]);
    }
  }
}

TEST_CASE("one-dimensional linear market has rank one") {
  InstanceSpec spec;
  spec.instance_class = InstanceClass::kLinear;
  spec.dim = 1;
  spec.customers = 4;
  spec.providers = 5;
  const MarketInstance inst = GenInstance(spec, 5);
  const UtilityMatrix& u = inst.truth;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (int x = 0; x < 5; ++x) {
        for (int y = x + 1; y < 5; ++y) {
          CHECK(std::abs(u.customer_utility(a, x) * u.customer_utility(b, y) -
                         u.customer_utility(a, y) * u.customer_utility(b, x)) <
                1e-15);
        }
      }
    }
  }
  for (const auto& c : inst.customer_contexts) CHECK(c.norm() <= 1.0);
  for (const auto& p : inst.provider_phi) CHECK(p.norm() <= 1.0);
}

TEST_CASE("hard instance construction") {
  const MarketInstance inst = GenHardInstance(2, 100, 6);
  CHECK(inst.truth.customers() == 2);
  CHECK(inst.truth.providers() == 10 * 2 * 6);
  CHECK(inst.noise == NoiseModel::kBernoulli);
  CHECK(inst.rho == doctest::Approx(std::sqrt(2.0 / 100.0)));
  for (int i = 0; i < 2; ++i) {
    CHECK(inst.alpha[i] >= 1);
    CHECK(inst.alpha[i] <= 2);
    int high = 0;
    for (int j = 0; j < inst.truth.providers(); ++j) {
      const double v = inst.truth.customer_utility(i, j);
      CHECK((v == 0.5 || v == 0.5 + inst.rho));
      high += v > 0.5;
      CHECK(inst.truth.provider_utility(j, i) == 0.0);
    }
    CHECK(high == inst.block_size);
  }
  const MarketInstance big = GenHardInstance(20, 1000, 6, 0.1);
  CHECK(big.block_size == 3);
  CHECK(big.truth.providers() == 10 * 20 * 10);
  for (int i = 0; i < 20; ++i) {
    int high = 0;
    for (int j = 0; j < big.truth.providers(); ++j) {
      high += big.truth.customer_utility(i, j) > 0.5;
    }
    CHECK(high == 3);
  }
  CHECK_THROWS_AS(GenHardInstance(1, 100, 6), Error);
  CHECK_THROWS_AS(GenHardInstance(2, 100, 6, 0.7), Error);
}

TEST_CASE("bernoulli noise needs unit-interval utilities") {
  InstanceSpec spec;
  spec.noise = NoiseModel::kBernoulli;
  CHECK_THROWS_AS(GenInstance(spec, 1), Error);
}

TEST_CASE("noisy feedback is unbiased") {
  InstanceSpec spec;
  spec.customers = 1;
  spec.providers = 1;
  const MarketInstance inst = GenInstance(spec, 9);
  NoisyFeedback channel(inst, 123);
  Matching x(1, 1);
  x.Add(0, 0);
  const int n = 20000;
  double sum_c = 0.0, sum_p = 0.0;
  for (int k = 0; k < n; ++k) {
    const std::vector<Observation> obs = channel.Observe(x);
    REQUIRE(obs.size() == 2);
    sum_c += obs[0].reward;
    sum_p += obs[1].reward;
  }
  const double tol = 3.0 / std::sqrt(n);
  CHECK(std::abs(sum_c / n - inst.truth.customer_utility(0, 0)) < tol);
  CHECK(std::abs(sum_p / n - inst.truth.provider_utility(0, 0)) < tol);

  const MarketInstance hard = GenHardInstance(2, 100, 1);
  NoisyFeedback coin(hard, 5);
  Matching y(2, hard.truth.providers());
  y.Add(0, 0);
  double heads = 0.0;
  for (int k = 0; k < n; ++k) {
    const std::vector<Observation> obs = coin.Observe(y);
    CHECK((obs[0].reward == 0.0 || obs[0].reward == 1.0));
    heads += obs[0].reward;
  }
  CHECK(std::abs(heads / n - hard.truth.customer_utility(0, 0)) <
        3.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("oracle sets incur no regret") {
  InstanceSpec spec;
  spec.customers = 3;
  spec.providers = 4;
  const MarketInstance inst = GenInstance(spec, 10);
  Policy policy({PolicyKind::kMatchUcb}, ConfidenceSets::Exact(inst.truth), 200);
  const RegretTrace tr = RunPolicy(inst, policy, 200, 10);
  CHECK(tr.rows.size() == 200);
  for (const TraceRow& r : tr.rows) {
    CHECK(r.instability < kTolerance);
    CHECK(r.contained);
  }
}

TEST_CASE("runs are reproducible") {
  InstanceSpec spec;
  spec.customers = 3;
  spec.providers = 3;
  spec.arrival.mode = ArrivalMode::kIidSubset;
  spec.arrival.probability = 0.8;
  const MarketInstance inst = GenInstance(spec, 11);
  for (PolicyKind k : {PolicyKind::kMatchUcb, PolicyKind::kMatchUcbPrime,
                       PolicyKind::kMatchNtuUcb, PolicyKind::kEtc,
                       PolicyKind::kRevenueFrictions}) {
    const PolicySpec ps{{k, 0.3, 0}, {}};
    const RegretTrace a = Run(inst, ps, 300, 12);
    const RegretTrace b = Run(inst, ps, 300, 12);
    REQUIRE(a.rows.size() == b.rows.size());
    bool same = true;
    for (size_t t = 0; t < a.rows.size(); ++t) {
      same = same && a.rows[t].instability == b.rows[t].instability &&
             a.rows[t].width_sum == b.rows[t].width_sum &&
             a.rows[t].revenue == b.rows[t].revenue &&
             a.rows[t].cum_regret == b.rows[t].cum_regret;
    }
    CHECK(same);
  }
}

TEST_CASE("trace invariants and scoring consistency") {
  InstanceSpec spec;
  spec.customers = 3;
  spec.providers = 3;
  spec.arrival.mode = ArrivalMode::kIidSubset;
  spec.arrival.probability = 0.7;
  const MarketInstance inst = GenInstance(spec, 13);
  RunOptions opts;
  opts.record_outcomes = true;
  const RegretTrace tr = Run(inst, {{PolicyKind::kMatchUcb}, {}}, 500, 14, opts);
  double prev = 0.0;
  double recomputed = 0.0;
  for (size_t t = 0; t < tr.rows.size(); ++t) {
    const TraceRow& r = tr.rows[t];
    CHECK(r.cum_regret >= prev);
    prev = r.cum_regret;
    if (r.contained) CHECK(r.instability <= r.width_sum + kTolerance);
    const auto [value, bound_only] =
        ScoreOutcome(inst, tr.outcomes[t], tr.arrivals[t], false, 0.0);
    CHECK_FALSE(bound_only);
    CHECK(value == r.instability);
    recomputed += value;
    // Only arrived agents are matched.
    for (const auto& [i, j] : tr.outcomes[t].matching.pairs()) {
      const Arrivals& a = tr.arrivals[t];
      CHECK(std::find(a.customers.begin(), a.customers.end(), i) != a.customers.end());
      CHECK(std::find(a.providers.begin(), a.providers.end(), j) != a.providers.end());
    }
  }
  CHECK(recomputed == tr.final_regret());
}

TEST_CASE("fixed arrival schedule") {
  InstanceSpec spec;
  spec.customers = 2;
  spec.providers = 2;
  spec.arrival.mode = ArrivalMode::kFixedSchedule;
  spec.arrival.schedule = {Arrivals{{0}, {1}}, Arrivals{{1}, {0, 1}}};
  const MarketInstance inst = GenInstance(spec, 15);
  Stream s(1);
  CHECK(DrawArrivals(inst, 1, s).customers == std::vector<int>{0});
  CHECK(DrawArrivals(inst, 2, s).providers == std::vector<int>{0, 1});
  CHECK(DrawArrivals(inst, 3, s).providers == std::vector<int>{1});
  spec.arrival.schedule = {Arrivals{{2}, {}}};
  CHECK_THROWS_AS(GenInstance(spec, 15), Error);
}

TEST_CASE("ntu scoring falls back to the bound above the guard") {
  InstanceSpec spec;
  spec.customers = 9;
  spec.providers = 3;
  const MarketInstance inst = GenInstance(spec, 16);
  const RegretTrace tr = Run(inst, {{PolicyKind::kMatchNtuUcb}, {}}, 20, 17);
  for (const TraceRow& r : tr.rows) {
    CHECK(r.bound_only);
    CHECK(r.instability == r.certified_bound);
  }
  spec.customers = 3;
  const RegretTrace exact =
      Run(GenInstance(spec, 16), {{PolicyKind::kMatchNtuUcb}, {}}, 20, 17);
  for (const TraceRow& r : exact.rows) CHECK_FALSE(r.bound_only);
}

TEST_CASE("three-agent fixture converges to the stable pair") {
  InstanceSpec spec;
  spec.instance_class = InstanceClass::kFixed;
  spec.fixed = testing::ThreeAgentMarket(12.0);
  int hits = 0, total = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    RunOptions opts;
    opts.record_outcomes = true;
    const RegretTrace tr =
        Run(GenInstance(spec, seed), {{PolicyKind::kMatchUcb}, {}}, 500, seed, opts);
    for (int t = 400; t < 500; ++t) {
      hits += tr.outcomes[t].matching.Contains(0, 0);
      ++total;
    }
  }
  MESSAGE("share of (C, P) in the last 100 rounds: " << hits << "/" << total);
  CHECK(hits >= 0.95 * total);
}

TEST_CASE("sweep is independent of the thread count") {
  std::vector<SweepCell> cells;
  for (PolicyKind k : {PolicyKind::kMatchUcb, PolicyKind::kEtc,
                       PolicyKind::kMatchNtuUcb}) {
    SweepCell c;
    c.instance.customers = 2;
    c.instance.providers = 3;
    c.policy.policy.kind = k;
    c.horizon = 200;
    c.seeds = {1, 2, 3};
    cells.push_back(c);
  }
  const std::vector<SweepResult> one = Sweep(cells, {1});
  const std::vector<SweepResult> four = Sweep(cells, {4});
  REQUIRE(one.size() == 3);
  for (size_t c = 0; c < 3; ++c) {
    CHECK(one[c].cum_regret.mean == four[c].cum_regret.mean);
    CHECK(one[c].cum_regret.stderr_ == four[c].cum_regret.stderr_);
    CHECK(one[c].traces.size() == 3);
    CHECK(one[c].cum_regret.mean.size() == 200);
    double mean = 0.0;
    for (const RegretTrace& t : one[c].traces) mean += t.final_regret() / 3.0;
    CHECK(one[c].cum_regret.mean.back() == doctest::Approx(mean));
  }
}

TEST_CASE("sweep guards") {
  SweepCell c;
  c.horizon = 1000;
  c.seeds = {1, 2};
  CHECK_THROWS_AS(Sweep({c}, {1, 1500}), Error);
  c.seeds.clear();
  CHECK_THROWS_AS(Sweep({c}), Error);
}

}  // namespace
}  // namespace smb
