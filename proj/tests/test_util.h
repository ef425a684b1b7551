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

#ifndef SMB_TESTS_TEST_UTIL_H_
#define SMB_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "smb/market.h"

namespace smb::testing {

// Charlene (customer 0); Percy (provider 0) and Quinn (provider 1).
inline UtilityMatrix ThreeAgentMarket(double scale = 1.0) {
  return UtilityMatrix::FromRows({{9.0 / scale, 12.0 / scale}},
                                 {{-5.0 / scale}, {-10.0 / scale}});
}

inline UtilityMatrix RandomMarket(std::mt19937_64& rng, int customers,
                                  int providers) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  UtilityMatrix u(customers, providers);
  for (int i = 0; i < customers; ++i) {
    for (int j = 0; j < providers; ++j) {
      u.set_customer_utility(i, j, d(rng));
      u.set_provider_utility(j, i, d(rng));
    }
  }
  return u;
}

// Random matching with random zero-sum transfers.
inline MarketOutcome RandomOutcome(std::mt19937_64& rng, int customers,
                                   int providers, double spread = 1.0) {
  Matching m(customers, providers);
  std::vector<int> order(providers);
  for (int j = 0; j < providers; ++j) order[j] = j;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution keep(0.7);
  for (int i = 0; i < customers && i < providers; ++i) {
    if (keep(rng)) m.Add(i, order[i]);
  }
  MarketOutcome out = MarketOutcome::WithoutTransfers(m);
  std::uniform_real_distribution<double> d(-spread, spread);
  for (const auto& [i, j] : m.pairs()) {
    out.transfers.customers[i] = d(rng);
    out.transfers.providers[j] = -out.transfers.customers[i];
  }
  return out;
}

inline std::pair<int, int> RandomSides(std::mt19937_64& rng, int max_agents) {
  std::uniform_int_distribution<int> c(1, max_agents - 1);
  const int customers = c(rng);
  std::uniform_int_distribution<int> p(1, max_agents - customers);
  return {customers, p(rng)};
}

}  // namespace smb::testing

#endif  // SMB_TESTS_TEST_UTIL_H_
