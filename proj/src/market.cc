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

#include "smb/market.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smb/assignment.h"
#include "smb/error.h"

namespace smb {

UtilityMatrix::UtilityMatrix(int customers, int providers)
    : customers_(customers),
      providers_(providers),
      customer_block_(static_cast<size_t>(customers) * providers, 0.0),
      provider_block_(static_cast<size_t>(customers) * providers, 0.0) {}

UtilityMatrix UtilityMatrix::FromRows(
    const std::vector<std::vector<double>>& customer_rows,
    const std::vector<std::vector<double>>& provider_rows) {
  const int m = static_cast<int>(customer_rows.size());
  const int n = static_cast<int>(provider_rows.size());
  UtilityMatrix u(m, n);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(customer_rows[i].size()) != n) {
      throw Error(ErrorCode::kConfigError,
                  "customer utility row " + std::to_string(i) + " has " +
                      std::to_string(customer_rows[i].size()) +
                      " entries, expected " + std::to_string(n));
    }
    for (int j = 0; j < n; ++j) u.set_customer_utility(i, j, customer_rows[i][j]);
  }
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(provider_rows[j].size()) != m) {
      throw Error(ErrorCode::kConfigError,
                  "provider utility row " + std::to_string(j) + " has " +
                      std::to_string(provider_rows[j].size()) +
                      " entries, expected " + std::to_string(m));
    }
    for (int i = 0; i < m; ++i) u.set_provider_utility(j, i, provider_rows[j][i]);
  }
  return u;
}

double UtilityMatrix::utility(AgentId agent, int partner) const {
  if (partner < 0) return 0.0;
  return agent.side == Side::kCustomer
             ? customer_utility(agent.index, partner)
             : provider_utility(agent.index, partner);
}

bool UtilityMatrix::InUnitRange() const {
  for (double v : customer_block_) {
    if (!(v >= -1.0 && v <= 1.0)) return false;
  }
  for (double v : provider_block_) {
    if (!(v >= -1.0 && v <= 1.0)) return false;
  }
  return true;
}

UtilityMatrix UtilityMatrix::Restrict(std::span<const int> customers,
                                      std::span<const int> providers) const {
  const int m = static_cast<int>(customers.size());
  const int n = static_cast<int>(providers.size());
  UtilityMatrix sub(m, n);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < n; ++b) {
      sub.set_customer_utility(a, b,
                               customer_utility(customers[a], providers[b]));
      sub.set_provider_utility(b, a,
                               provider_utility(providers[b], customers[a]));
    }
  }
  return sub;
}

std::vector<double> UtilityMatrix::JointWeights() const {
  std::vector<double> w(static_cast<size_t>(customers_) * providers_);
  for (int i = 0; i < customers_; ++i) {
    for (int j = 0; j < providers_; ++j) {
      w[static_cast<size_t>(i) * providers_ + j] = joint(i, j);
    }
  }
  return w;
}

Matching::Matching(int customers, int providers)
    : customer_partner_(customers, kUnmatched),
      provider_partner_(providers, kUnmatched) {}

void Matching::Add(int customer, int provider) {
  if (customer < 0 || customer >= customers() || provider < 0 ||
      provider >= providers()) {
    throw Error(ErrorCode::kInvalidOutcome,
                "pair (" + std::to_string(customer) + ", " +
                    std::to_string(provider) + ") is out of range");
  }
  if (customer_partner_[customer] != kUnmatched ||
      provider_partner_[provider] != kUnmatched) {
    throw Error(ErrorCode::kInvalidOutcome,
                "pair (" + std::to_string(customer) + ", " +
                    std::to_string(provider) +
                    ") reuses an already matched agent");
  }
  customer_partner_[customer] = provider;
  provider_partner_[provider] = customer;
  ++size_;
}

void Matching::Remove(int customer) {
  const int j = customer_partner_[customer];
  if (j == kUnmatched) return;
  customer_partner_[customer] = kUnmatched;
  provider_partner_[j] = kUnmatched;
  --size_;
}

int Matching::partner(AgentId agent) const {
  return agent.side == Side::kCustomer ? customer_partner_[agent.index]
                                       : provider_partner_[agent.index];
}

std::vector<std::pair<int, int>> Matching::pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(size_);
  for (int i = 0; i < customers(); ++i) {
    if (customer_partner_[i] != kUnmatched) {
      out.emplace_back(i, customer_partner_[i]);
    }
  }
  return out;
}

AgentVector AgentVector::Zeros(int customers, int providers) {
  return AgentVector{std::vector<double>(customers, 0.0),
                     std::vector<double>(providers, 0.0)};
}

double AgentVector::Sum() const {
  double s = 0.0;
  for (double v : customers) s += v;
  for (double v : providers) s += v;
  return s;
}

MarketOutcome MarketOutcome::WithoutTransfers(const Matching& matching) {
  return MarketOutcome{matching, AgentVector::Zeros(matching.customers(),
                                                    matching.providers())};
}

bool MarketOutcome::IsZeroSum(double tolerance) const {
  if (static_cast<int>(transfers.customers.size()) != matching.customers() ||
      static_cast<int>(transfers.providers.size()) != matching.providers()) {
    return false;
  }
  for (int i = 0; i < matching.customers(); ++i) {
    const int j = matching.customer_partner(i);
    if (j == Matching::kUnmatched) {
      if (std::abs(transfers.customers[i]) > tolerance) return false;
    } else if (std::abs(transfers.customers[i] + transfers.providers[j]) >
               tolerance) {
      return false;
    }
  }
  for (int j = 0; j < matching.providers(); ++j) {
    if (matching.provider_partner(j) == Matching::kUnmatched &&
        std::abs(transfers.providers[j]) > tolerance) {
      return false;
    }
  }
  return true;
}

void RequireZeroSum(const MarketOutcome& outcome, int customers,
                    int providers) {
  if (outcome.matching.customers() != customers ||
      outcome.matching.providers() != providers) {
    throw Error(ErrorCode::kInvalidOutcome,
                "outcome does not match the market size");
  }
  if (!outcome.IsZeroSum()) {
    throw Error(ErrorCode::kInvalidOutcome, "transfers are not zero-sum");
  }
}

namespace {

void RequireSized(const UtilityMatrix& u, const MarketOutcome& outcome) {
  if (outcome.matching.customers() != u.customers() ||
      outcome.matching.providers() != u.providers() ||
      static_cast<int>(outcome.transfers.customers.size()) != u.customers() ||
      static_cast<int>(outcome.transfers.providers.size()) != u.providers()) {
    throw Error(ErrorCode::kInvalidOutcome,
                "outcome does not match the market size");
  }
}

PrimalDual Solve(const UtilityMatrix& u, std::span<const double> weights) {
  const AssignmentSolution sol =
      SolveMaxWeightAssignment(weights, u.customers(), u.providers());
  PrimalDual out;
  out.matching = Matching(u.customers(), u.providers());
  for (int i = 0; i < u.customers(); ++i) {
    if (sol.row_partner[i] >= 0) out.matching.Add(i, sol.row_partner[i]);
  }
  out.prices = AgentVector{sol.row_prices, sol.col_prices};
  out.weight = sol.weight;
  return out;
}

}  // namespace

double MatchingWeight(const UtilityMatrix& u, const Matching& m) {
  double w = 0.0;
  for (const auto& [i, j] : m.pairs()) w += u.joint(i, j);
  return w;
}

AgentVector Payoffs(const UtilityMatrix& u, const MarketOutcome& outcome) {
  RequireSized(u, outcome);
  AgentVector p = outcome.transfers;
  for (int i = 0; i < u.customers(); ++i) {
    p.customers[i] +=
        u.utility({Side::kCustomer, i}, outcome.matching.customer_partner(i));
  }
  for (int j = 0; j < u.providers(); ++j) {
    p.providers[j] +=
        u.utility({Side::kProvider, j}, outcome.matching.provider_partner(j));
  }
  return p;
}

PrimalDual MaxWeightMatchingWithDuals(const UtilityMatrix& u) {
  const std::vector<double> w = u.JointWeights();
  return Solve(u, w);
}

MarketOutcome OutcomeFromPrices(const UtilityMatrix& u,
                                const PrimalDual& solution) {
  MarketOutcome out = MarketOutcome::WithoutTransfers(solution.matching);
  for (const auto& [i, j] : solution.matching.pairs()) {
    // Setting the provider side as the negation keeps the outcome exactly
    // zero-sum in floating point.
    out.transfers.customers[i] =
        solution.prices.customers[i] - u.customer_utility(i, j);
    out.transfers.providers[j] = -out.transfers.customers[i];
  }
  return out;
}

WeightedMatching SecondBestMatching(const UtilityMatrix& u,
                                    const Matching& best) {
  constexpr double kForbidden = -std::numeric_limits<double>::infinity();
  const int m = u.customers();
  const int n = u.providers();
  if (m == 0 || n == 0) {
    throw Error(ErrorCode::kNoAlternative,
                "market admits only the empty matching");
  }
  const std::vector<double> base = u.JointWeights();
  bool found = false;
  WeightedMatching result;
  auto consider = [&](Matching candidate) {
    const double w = MatchingWeight(u, candidate);
    if (!found || w > result.weight + kTolerance) {
      found = true;
      result.matching = std::move(candidate);
      result.weight = w;
    }
  };

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<double> w = base;
      if (best.Contains(i, j)) {
        w[static_cast<size_t>(i) * n + j] = kForbidden;
        consider(Solve(u, w).matching);
      } else {
        // Forcing (i, j): solve the rest with row i and column j removed.
        for (int c = 0; c < n; ++c) w[static_cast<size_t>(i) * n + c] = kForbidden;
        for (int r = 0; r < m; ++r) w[static_cast<size_t>(r) * n + j] = kForbidden;
        Matching forced = Solve(u, w).matching;
        forced.Add(i, j);
        consider(std::move(forced));
      }
    }
  }
  return result;
}

bool IsEpsilonStable(const UtilityMatrix& u, const MarketOutcome& outcome,
                     double eps) {
  const AgentVector p = Payoffs(u, outcome);
  const double slack = eps + kTolerance;
  for (double v : p.customers) {
    if (v < -slack) return false;
  }
  for (double v : p.providers) {
    if (v < -slack) return false;
  }
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      if (p.customers[i] + p.providers[j] < u.joint(i, j) - 2.0 * slack) {
        return false;
      }
    }
  }
  return true;
}

bool IsStableTu(const UtilityMatrix& u, const MarketOutcome& outcome,
                double eps) {
  RequireZeroSum(outcome, u.customers(), u.providers());
  return IsEpsilonStable(u, outcome, eps);
}

bool IsStableNtu(const UtilityMatrix& u, const Matching& m) {
  std::vector<double> own_c(u.customers()), own_p(u.providers());
  for (int i = 0; i < u.customers(); ++i) {
    own_c[i] = u.utility({Side::kCustomer, i}, m.customer_partner(i));
    if (own_c[i] < -kTolerance) return false;
  }
  for (int j = 0; j < u.providers(); ++j) {
    own_p[j] = u.utility({Side::kProvider, j}, m.provider_partner(j));
    if (own_p[j] < -kTolerance) return false;
  }
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      if (m.Contains(i, j)) continue;
      const double gain_i = u.customer_utility(i, j) - own_c[i];
      const double gain_j = u.provider_utility(j, i) - own_p[j];
      if (std::min(gain_i, gain_j) > kTolerance) return false;
    }
  }
  return true;
}

Arrivals Arrivals::All(int customers, int providers) {
  Arrivals a;
  a.customers.resize(customers);
  a.providers.resize(providers);
  for (int i = 0; i < customers; ++i) a.customers[i] = i;
  for (int j = 0; j < providers; ++j) a.providers[j] = j;
  return a;
}

}  // namespace smb
