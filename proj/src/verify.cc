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

#include "smb/verify.h"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "smb/algorithms.h"
#include "smb/error.h"
#include "smb/instability.h"
#include "smb/intervals.h"
#include "smb/market.h"
#include "smb/oracles.h"
#include "smb/rng.h"

namespace smb {
namespace {

constexpr int kMaxAgents = 8;

class Checker {
 public:
  void Expect(const std::string& name, bool ok, int trial,
              const std::string& detail) {
    CheckOutcome& c = Slot(name);
    ++c.evaluations;
    if (ok) return;
    if (c.violations++ == 0) {
      c.first_violation = "case " + std::to_string(trial) + ": " + detail;
    }
  }

  void Near(const std::string& name, double got, double want, int trial) {
    std::ostringstream s;
    s.precision(17);
    s << got << " vs " << want;
    Expect(name, std::abs(got - want) <= kTolerance, trial, s.str());
  }

  std::vector<CheckOutcome> Take() {
    std::vector<CheckOutcome> out;
    for (const std::string& n : order_) out.push_back(by_name_[n]);
    return out;
  }

 private:
  CheckOutcome& Slot(const std::string& name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) {
      order_.push_back(name);
      CheckOutcome fresh;
      fresh.name = name;
      it = by_name_.emplace(name, fresh).first;
    }
    return it->second;
  }

  std::vector<std::string> order_;
  std::map<std::string, CheckOutcome> by_name_;
};

UtilityMatrix RandomMarket(Stream& rng, int m, int n) {
  UtilityMatrix u(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      u.set_customer_utility(i, j, rng.Uniform(-1.0, 1.0));
      u.set_provider_utility(j, i, rng.Uniform(-1.0, 1.0));
    }
  }
  return u;
}

MarketOutcome RandomOutcome(Stream& rng, int m, int n) {
  Matching x(m, n);
  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) order[j] = j;
  for (int j = n - 1; j > 0; --j) std::swap(order[j], order[rng.Index(j + 1)]);
  for (int i = 0; i < m && i < n; ++i) {
    if (rng.Bernoulli(0.7)) x.Add(i, order[i]);
  }
  MarketOutcome o = MarketOutcome::WithoutTransfers(x);
  for (const auto& [i, j] : x.pairs()) {
    o.transfers.customers[i] = rng.Uniform(-1.0, 1.0);
    o.transfers.providers[j] = -o.transfers.customers[i];
  }
  return o;
}

IntervalTable RandomContaining(Stream& rng, const UtilityMatrix& u,
                               double max_half) {
  IntervalTable t(u.customers(), u.providers());
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      const double c = u.customer_utility(i, j);
      t.customer_view(i, j) = {c - max_half * rng.Uniform(),
                               c + max_half * rng.Uniform()};
      const double p = u.provider_utility(j, i);
      t.provider_view(j, i) = {p - max_half * rng.Uniform(),
                               p + max_half * rng.Uniform()};
    }
  }
  return t;
}

void CheckCase(Checker& chk, Stream& rng, int trial) {
  const int m = 1 + static_cast<int>(rng.Index(kMaxAgents - 1));
  const int n = 1 + static_cast<int>(rng.Index(kMaxAgents - m));
  const UtilityMatrix u = RandomMarket(rng, m, n);
  const MarketOutcome o = RandomOutcome(rng, m, n);

  // Max-weight matching and its duals.
  const PrimalDual pd = MaxWeightMatchingWithDuals(u);
  chk.Near("matching weight equals dual objective", pd.weight,
           pd.prices.Sum(), trial);
  chk.Near("matching weight equals enumeration", pd.weight,
           oracle::BestMatchingWeight(u), trial);
  bool feasible = true;
  for (int i = 0; i < m; ++i) {
    feasible &= pd.prices.customers[i] >= -kTolerance;
    for (int j = 0; j < n; ++j) {
      feasible &= pd.prices.customers[i] + pd.prices.providers[j] >=
                  u.joint(i, j) - kTolerance;
    }
  }
  for (int j = 0; j < n; ++j) feasible &= pd.prices.providers[j] >= -kTolerance;
  chk.Expect("dual prices are feasible", feasible, trial, "violated constraint");
  const MarketOutcome priced = OutcomeFromPrices(u, pd);
  chk.Expect("priced optimum is stable", IsStableTu(u, priced), trial,
             "blocking pair or IR violation");
  try {
    const WeightedMatching second = SecondBestMatching(u, pd.matching);
    chk.Near("second best equals enumeration", second.weight,
             oracle::SecondBestMatchingWeight(u, pd.matching), trial);
  } catch (const Error& e) {
    chk.Expect("second best equals enumeration",
               e.code() == ErrorCode::kNoAlternative &&
                   oracle::AllMatchings(m, n).size() == 1,
               trial, e.what());
  }

  // Equivalent formulations of Subset Instability.
  const InstabilityReport r = SubsetInstability(u, o);
  chk.Near("dual value equals subset enumeration", r.value,
           SubsetInstabilityBruteforce(u, o), trial);
  chk.Near("dual value equals minimum subsidy", r.value,
           MinStabilizingSubsidy(u, o).value, trial);
  chk.Near("dual value equals coalition unhappiness", r.value,
           oracle::MaxUnhappiness(u, o), trial);
  chk.Expect("subsidies stabilize", IsSubsidyStabilizing(u, o, r.subsidies),
             trial, "subsidized outcome is blocked");
  chk.Expect("utility difference is a lower bound",
             UtilityDifference(u, o) <= r.value + kTolerance, trial,
             "utility difference exceeds instability");

  // Zero exactly on stable outcomes, in both directions.
  chk.Expect("zero iff stable on random outcomes",
             (r.value <= kTolerance) == IsStableTu(u, o), trial,
             "value " + std::to_string(r.value));
  chk.Expect("stable outcome scores zero",
             SubsetInstability(u, priced).value <= kTolerance, trial,
             "positive instability on a stable outcome");

  // Lipschitz in the utilities: each agent's row moves by at most delta_a.
  UtilityMatrix v = u;
  double bound = 0.0;
  for (int i = 0; i < m; ++i) {
    const double delta = 0.2 * rng.Uniform();
    for (int j = 0; j < n; ++j) {
      v.set_customer_utility(
          i, j, u.customer_utility(i, j) + delta * rng.Uniform(-1.0, 1.0));
    }
    bound += 2.0 * delta;
  }
  for (int j = 0; j < n; ++j) {
    const double delta = 0.2 * rng.Uniform();
    for (int i = 0; i < m; ++i) {
      v.set_provider_utility(
          j, i, u.provider_utility(j, i) + delta * rng.Uniform(-1.0, 1.0));
    }
    bound += 2.0 * delta;
  }
  chk.Expect("instability is Lipschitz",
             std::abs(SubsetInstability(v, o).value - r.value) <=
                 bound + kTolerance,
             trial, "perturbation exceeds the bound");

  // Without transfers.
  const NtuInstabilityReport ntu = NtuSubsetInstability(u, o.matching);
  chk.Near("ntu value equals provider enumeration", ntu.value,
           oracle::NtuInstabilityByProviders(u, o.matching), trial);
  chk.Expect("ntu subsidies are feasible",
             IsNtuSubsidyFeasible(u, o.matching, ntu.subsidies), trial,
             "a blocking pair survives");
  chk.Expect("ntu zero iff stable",
             (ntu.value <= kTolerance) == IsStableNtu(u, o.matching), trial,
             "value " + std::to_string(ntu.value));
  chk.Expect("ntu instability is Lipschitz",
             std::abs(NtuSubsetInstability(v, o.matching).value - ntu.value) <=
                 bound + kTolerance,
             trial, "perturbation exceeds the bound");

  // Confidence-set certificates with intervals that contain the truth.
  const IntervalTable t = RandomContaining(rng, u, 0.5);
  const Arrivals all = Arrivals::All(m, n);
  const MarketOutcome chosen = ComputeMatch(t, all);
  chk.Expect("optimistic outcome is stable for its bounds",
             IsStableTu(t.Upper(), chosen), trial, "unstable for UCB");
  chk.Expect("instability is bounded by matched widths",
             SubsetInstability(u, chosen).value <=
                 t.WidthSum(chosen.matching) + kTolerance,
             trial, "certificate exceeded");
  const Matching da = ComputeMatchNtu(t, all);
  chk.Expect("deferred acceptance is stable for its bounds",
             IsStableNtu(t.Upper(), da), trial, "blocking pair");
  chk.Expect("ntu instability is bounded by matched widths",
             NtuSubsetInstability(u, da).value <=
                 NtuInstabilityUpperBound(t, da) + kTolerance,
             trial, "certificate exceeded");
}

}  // namespace

VerifyReport RunVerification(uint64_t seed, int cases) {
  if (cases < 1) throw Error(ErrorCode::kConfigError, "cases must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  Checker chk;
  Stream rng(seed);
  for (int trial = 0; trial < cases; ++trial) CheckCase(chk, rng, trial);
  VerifyReport report;
  report.checks = chk.Take();
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

void PrintReport(const VerifyReport& report, std::ostream& out) {
  for (const CheckOutcome& c : report.checks) {
    out << (c.violations == 0 ? "ok   " : "FAIL ") << c.name << " ("
        << c.evaluations - c.violations << "/" << c.evaluations << ")";
    if (c.violations > 0) out << "  first: " << c.first_violation;
    out << "\n";
  }
  out << (report.ok() ? "verify: all checks passed" : "verify: FAILED")
      << " in " << report.wall_seconds << " s\n";
}

}  // namespace smb
