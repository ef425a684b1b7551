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

#include "smb/oracles.h"

#include <algorithm>
#include <functional>
#include <limits>

namespace smb::oracle {

std::vector<Matching> AllMatchings(int customers, int providers) {
  std::vector<Matching> out;
  Matching current(customers, providers);
  std::function<void(int)> rec = [&](int i) {
    if (i == customers) {
      out.push_back(current);
      return;
    }
    rec(i + 1);
    for (int j = 0; j < providers; ++j) {
      if (current.provider_partner(j) != Matching::kUnmatched) continue;
      current.Add(i, j);
      rec(i + 1);
      current.Remove(i);
    }
  };
  rec(0);
  return out;
}

double BestMatchingWeight(const UtilityMatrix& u) {
  double best = 0.0;
  for (const Matching& m : AllMatchings(u.customers(), u.providers())) {
    best = std::max(best, MatchingWeight(u, m));
  }
  return best;
}

double SecondBestMatchingWeight(const UtilityMatrix& u, const Matching& best) {
  double second = -std::numeric_limits<double>::infinity();
  for (const Matching& m : AllMatchings(u.customers(), u.providers())) {
    if (m == best) continue;
    second = std::max(second, MatchingWeight(u, m));
  }
  return second;
}

double MaxUnhappiness(const UtilityMatrix& u, const MarketOutcome& outcome) {
  const AgentVector p = Payoffs(u, outcome);
  const int mc = u.customers();
  const int np = u.providers();
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << (mc + np)); ++mask) {
    auto in_c = [&](int i) { return (mask >> i & 1u) != 0; };
    auto in_p = [&](int j) { return (mask >> (mc + j) & 1u) != 0; };
    for (const Matching& x : AllMatchings(mc, np)) {
      bool inside = true;
      for (const auto& [i, j] : x.pairs()) {
        if (!in_c(i) || !in_p(j)) inside = false;
      }
      if (!inside) continue;
      // Zero-sum transfers exist that leave every member weakly better off
      // iff each new pair covers both members' old payoffs and each
      // unmatched member already had a nonpositive payoff.
      bool feasible = true;
      double gain = 0.0;
      for (int i = 0; i < mc && feasible; ++i) {
        if (!in_c(i)) continue;
        const int j = x.customer_partner(i);
        if (j == Matching::kUnmatched) {
          feasible = p.customers[i] <= 0.0;
          gain -= p.customers[i];
        } else {
          const double surplus =
              u.joint(i, j) - p.customers[i] - p.providers[j];
          feasible = surplus >= 0.0;
          gain += surplus;
        }
      }
      for (int j = 0; j < np && feasible; ++j) {
        if (!in_p(j) || x.provider_partner(j) != Matching::kUnmatched) continue;
        feasible = p.providers[j] <= 0.0;
        gain -= p.providers[j];
      }
      if (feasible) best = std::max(best, gain);
    }
  }
  return best;
}

double NtuInstabilityByProviders(const UtilityMatrix& u, const Matching& m) {
  const int mc = u.customers();
  const int np = u.providers();
  std::vector<double> own_c(mc), own_p(np);
  for (int i = 0; i < mc; ++i) {
    own_c[i] = u.utility({Side::kCustomer, i}, m.customer_partner(i));
  }
  for (int j = 0; j < np; ++j) {
    own_p[j] = u.utility({Side::kProvider, j}, m.provider_partner(j));
  }
  std::vector<std::vector<double>> candidates(np);
  for (int j = 0; j < np; ++j) {
    const double floor = std::max(0.0, -own_p[j]);
    candidates[j].push_back(floor);
    for (int i = 0; i < mc; ++i) {
      candidates[j].push_back(
          std::max(floor, u.provider_utility(j, i) - own_p[j]));
    }
  }
  std::vector<double> s_p(np, 0.0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int)> rec = [&](int j) {
    if (j < np) {
      for (double c : candidates[j]) {
        s_p[j] = c;
        rec(j + 1);
      }
      return;
    }
    double total = 0.0;
    for (double v : s_p) total += v;
    for (int i = 0; i < mc; ++i) {
      double need = std::max(0.0, -own_c[i]);
      for (int k = 0; k < np; ++k) {
        if (m.Contains(i, k)) continue;
        if (u.provider_utility(k, i) - own_p[k] - s_p[k] > 0.0) {
          need = std::max(need, u.customer_utility(i, k) - own_c[i]);
        }
      }
      total += need;
    }
    best = std::min(best, total);
  };
  rec(0);
  return best;
}

}  // namespace smb::oracle
