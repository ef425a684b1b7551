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

#include "smb/confidence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smb/error.h"

namespace smb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval Clip(double center, double half_width) {
  // Projecting both endpoints keeps lo <= hi even when a noisy mean falls
  // outside [-1, 1].
  Interval c;
  c.lo = std::clamp(center - half_width, -1.0, 1.0);
  c.hi = std::clamp(center + half_width, -1.0, 1.0);
  return c;
}

void CheckContexts(const std::vector<Eigen::VectorXd>& contexts, int dim) {
  for (const Eigen::VectorXd& c : contexts) {
    if (c.size() != dim) {
      throw Error(ErrorCode::kInvalidContext,
                  "context of dimension " + std::to_string(c.size()) +
                      ", expected " + std::to_string(dim));
    }
    if (c.norm() > 1.0 + 1e-12) {
      throw Error(ErrorCode::kInvalidContext,
                  "context norm " + std::to_string(c.norm()) + " exceeds 1");
    }
  }
}

}  // namespace

ConfidenceSets::ConfidenceSets(ConfidenceMode mode, int customers,
                               int providers, ConfidenceParams params)
    : mode_(mode), params_(params), intervals_(customers, providers) {}

ConfidenceSets ConfidenceSets::Unstructured(int customers, int providers,
                                            ConfidenceParams params) {
  ConfidenceSets c(ConfidenceMode::kUnstructured, customers, providers,
                   params);
  const size_t keys = static_cast<size_t>(customers) * providers;
  c.count_.assign(keys, 0);
  c.customer_sum_.assign(keys, 0.0);
  c.provider_sum_.assign(keys, 0.0);
  return c;
}

ConfidenceSets ConfidenceSets::Exact(const UtilityMatrix& truth) {
  ConfidenceSets c = Unstructured(truth.customers(), truth.providers());
  for (int i = 0; i < truth.customers(); ++i) {
    for (int j = 0; j < truth.providers(); ++j) {
      const double a = truth.customer_utility(i, j);
      const double b = truth.provider_utility(j, i);
      c.intervals_.customer_view(i, j) = {a, a};
      c.intervals_.provider_view(j, i) = {b, b};
    }
  }
  c.frozen_ = true;
  return c;
}

ConfidenceSets ConfidenceSets::Typed(std::vector<int> customer_types,
                                     std::vector<int> provider_types,
                                     int num_types, ConfidenceParams params) {
  for (int t : customer_types) {
    if (t < 0 || t >= num_types) {
      throw Error(ErrorCode::kConfigError, "customer type out of range");
    }
  }
  for (int t : provider_types) {
    if (t < 0 || t >= num_types) {
      throw Error(ErrorCode::kConfigError, "provider type out of range");
    }
  }
  ConfidenceSets c(ConfidenceMode::kTyped,
                   static_cast<int>(customer_types.size()),
                   static_cast<int>(provider_types.size()), params);
  const size_t keys = static_cast<size_t>(num_types) * num_types;
  c.count_.assign(keys, 0);
  c.customer_sum_.assign(keys, 0.0);
  c.provider_sum_.assign(keys, 0.0);
  c.customer_types_ = std::move(customer_types);
  c.provider_types_ = std::move(provider_types);
  c.num_types_ = num_types;
  return c;
}

ConfidenceSets ConfidenceSets::Linear(
    std::vector<Eigen::VectorXd> customer_contexts,
    std::vector<Eigen::VectorXd> provider_contexts, ConfidenceParams params) {
  const int dim = !customer_contexts.empty()   ? customer_contexts[0].size()
                  : !provider_contexts.empty() ? provider_contexts[0].size()
                                               : 1;
  if (dim < 1) throw Error(ErrorCode::kInvalidContext, "empty contexts");
  CheckContexts(customer_contexts, dim);
  CheckContexts(provider_contexts, dim);
  ConfidenceSets c(ConfidenceMode::kLinear,
                   static_cast<int>(customer_contexts.size()),
                   static_cast<int>(provider_contexts.size()), params);
  c.customer_contexts_ = std::move(customer_contexts);
  c.provider_contexts_ = std::move(provider_contexts);
  c.linear_.resize(c.agents());
  for (LinearAgent& a : c.linear_) {
    a.gram = params.ridge * Eigen::MatrixXd::Identity(dim, dim);
    a.moment = Eigen::VectorXd::Zero(dim);
    a.estimate = Eigen::VectorXd::Zero(dim);
  }
  return c;
}

int ConfidenceSets::Key(int i, int j) const {
  if (mode_ == ConfidenceMode::kTyped) {
    return customer_types_[i] * num_types_ + provider_types_[j];
  }
  return i * providers() + j;
}

int ConfidenceSets::CustomerCount(int i, int j) const {
  if (mode_ == ConfidenceMode::kLinear) {
    return linear({Side::kCustomer, i}).observations;
  }
  return count_[Key(i, j)];
}

int ConfidenceSets::ProviderCount(int j, int i) const {
  if (mode_ == ConfidenceMode::kLinear) {
    return linear({Side::kProvider, j}).observations;
  }
  return count_[Key(i, j)];
}

double ConfidenceSets::HalfWidth(int count, int horizon) const {
  if (count == 0) return kInf;
  return params_.ucb_scale *
         std::sqrt(std::log(static_cast<double>(agents()) * horizon) / count);
}

double ConfidenceSets::CustomerHalfWidth(int i, int j) const {
  if (frozen_) return 0.0;
  if (mode_ == ConfidenceMode::kLinear) {
    const LinearAgent& a = linear({Side::kCustomer, i});
    if (a.observations == 0) return kInf;
    const Eigen::VectorXd& c = provider_contexts_[j];
    return std::sqrt(a.beta * c.dot(a.gram.ldlt().solve(c)));
  }
  return HalfWidth(count_[Key(i, j)], last_horizon_);
}

double ConfidenceSets::ProviderHalfWidth(int j, int i) const {
  if (frozen_) return 0.0;
  if (mode_ == ConfidenceMode::kLinear) {
    const LinearAgent& a = linear({Side::kProvider, j});
    if (a.observations == 0) return kInf;
    const Eigen::VectorXd& c = customer_contexts_[i];
    return std::sqrt(a.beta * c.dot(a.gram.ldlt().solve(c)));
  }
  return HalfWidth(count_[Key(i, j)], last_horizon_);
}

void ConfidenceSets::ValidateFeedback(
    const Matching& matching, const std::vector<Observation>& feedback) const {
  if (matching.customers() != customers() ||
      matching.providers() != providers()) {
    throw Error(ErrorCode::kProtocolViolation,
                "matching does not fit the confidence sets");
  }
  std::vector<char> seen_c(customers(), 0), seen_p(providers(), 0);
  for (const Observation& o : feedback) {
    const int count = o.agent.side == Side::kCustomer ? customers()
                                                      : providers();
    if (o.agent.index < 0 || o.agent.index >= count) {
      throw Error(ErrorCode::kProtocolViolation, "feedback from unknown agent");
    }
    if (matching.partner(o.agent) == Matching::kUnmatched) {
      throw Error(ErrorCode::kProtocolViolation,
                  "feedback from an unmatched agent");
    }
    if (!std::isfinite(o.reward)) {
      throw Error(ErrorCode::kProtocolViolation, "non-finite reward");
    }
    char& seen = o.agent.side == Side::kCustomer ? seen_c[o.agent.index]
                                                 : seen_p[o.agent.index];
    if (seen) {
      throw Error(ErrorCode::kProtocolViolation, "duplicate feedback");
    }
    seen = 1;
  }
  if (static_cast<int>(feedback.size()) != 2 * matching.size()) {
    throw Error(ErrorCode::kProtocolViolation,
                "expected one observation per matched agent");
  }
}

void ConfidenceSets::RefreshPair(int i, int j, int horizon) {
  const int key = Key(i, j);
  const int n = count_[key];
  if (n == 0) return;
  const double h = HalfWidth(n, horizon);
  intervals_.customer_view(i, j) = Clip(customer_sum_[key] / n, h);
  intervals_.provider_view(j, i) = Clip(provider_sum_[key] / n, h);
}

void ConfidenceSets::RefreshLinear(AgentId agent, int horizon) {
  LinearAgent& a = linear(agent);
  if (a.observations == 0) return;
  const int dim = static_cast<int>(a.moment.size());
  const double total = static_cast<double>(agents()) * horizon;
  // The radius carries an extra n * sqrt(ln(n / (T |A|))) / T^2 term whose
  // logarithm is negative until n exceeds T |A|; it is dropped there.
  double extra = 0.0;
  if (a.arrivals > total) {
    extra = a.arrivals * std::sqrt(std::log(a.arrivals / total)) /
            (static_cast<double>(horizon) * horizon);
  }
  a.beta = params_.beta_dim_coef * dim * std::log(1.0 + horizon) +
           params_.beta_log_coef * std::log(total) + extra;

  const Eigen::LDLT<Eigen::MatrixXd> solver = a.gram.ldlt();
  a.estimate = solver.solve(a.moment);
  const double norm = a.estimate.norm();
  if (norm > 1.0) a.estimate /= norm;

  const double radius = std::sqrt(a.beta);
  if (agent.side == Side::kCustomer) {
    for (int j = 0; j < providers(); ++j) {
      const Eigen::VectorXd& c = provider_contexts_[j];
      intervals_.customer_view(agent.index, j) =
          Clip(c.dot(a.estimate), radius * std::sqrt(c.dot(solver.solve(c))));
    }
  } else {
    for (int i = 0; i < customers(); ++i) {
      const Eigen::VectorXd& c = customer_contexts_[i];
      intervals_.provider_view(agent.index, i) =
          Clip(c.dot(a.estimate), radius * std::sqrt(c.dot(solver.solve(c))));
    }
  }
}

void ConfidenceSets::Update(const Arrivals& arrivals, const Matching& matching,
                            const std::vector<Observation>& feedback,
                            int horizon) {
  ValidateFeedback(matching, feedback);
  if (frozen_) return;
  last_horizon_ = horizon;

  if (mode_ == ConfidenceMode::kLinear) {
    for (int i : arrivals.customers) ++linear({Side::kCustomer, i}).arrivals;
    for (int j : arrivals.providers) ++linear({Side::kProvider, j}).arrivals;
    for (const Observation& o : feedback) {
      LinearAgent& a = linear(o.agent);
      const int partner = matching.partner(o.agent);
      const Eigen::VectorXd& c = o.agent.side == Side::kCustomer
                                     ? provider_contexts_[partner]
                                     : customer_contexts_[partner];
      a.gram.noalias() += c * c.transpose();
      a.moment += o.reward * c;
      ++a.observations;
    }
    for (const Observation& o : feedback) RefreshLinear(o.agent, horizon);
    return;
  }

  for (const Observation& o : feedback) {
    const int partner = matching.partner(o.agent);
    if (o.agent.side == Side::kCustomer) {
      const int key = Key(o.agent.index, partner);
      customer_sum_[key] += o.reward;
      ++count_[key];
    } else {
      provider_sum_[Key(partner, o.agent.index)] += o.reward;
    }
  }
  if (mode_ == ConfidenceMode::kUnstructured) {
    for (const auto& [i, j] : matching.pairs()) RefreshPair(i, j, horizon);
    return;
  }
  // A type pair is shared by every agent pair with those types.
  std::vector<char> touched(count_.size(), 0);
  for (const auto& [i, j] : matching.pairs()) touched[Key(i, j)] = 1;
  for (int i = 0; i < customers(); ++i) {
    for (int j = 0; j < providers(); ++j) {
      if (touched[Key(i, j)]) RefreshPair(i, j, horizon);
    }
  }
}

Eigen::VectorXd ConfidenceSets::Estimate(AgentId agent) const {
  if (mode_ != ConfidenceMode::kLinear) {
    throw Error(ErrorCode::kConfigError, "estimates exist in linear mode only");
  }
  return linear(agent).estimate;
}

double ConfidenceSets::Beta(AgentId agent) const {
  if (mode_ != ConfidenceMode::kLinear) {
    throw Error(ErrorCode::kConfigError, "beta exists in linear mode only");
  }
  return linear(agent).beta;
}

nlohmann::json ConfidenceSets::ToJson() const {
  auto cell = [](const Interval& c, int n) {
    return nlohmann::json{{"lo", c.lo}, {"hi", c.hi}, {"n", n}, {"mean", 0.0}};
  };
  nlohmann::json out;
  out["mode"] = mode_ == ConfidenceMode::kUnstructured ? "unstructured"
                : mode_ == ConfidenceMode::kTyped      ? "typed"
                                                       : "linear";
  nlohmann::json cv = nlohmann::json::array();
  for (int i = 0; i < customers(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < providers(); ++j) {
      nlohmann::json e = cell(intervals_.customer_view(i, j), CustomerCount(i, j));
      if (mode_ == ConfidenceMode::kLinear) {
        e["mean"] = provider_contexts_[j].dot(linear({Side::kCustomer, i}).estimate);
      } else if (count_[Key(i, j)] > 0) {
        e["mean"] = customer_sum_[Key(i, j)] / count_[Key(i, j)];
      }
      row.push_back(std::move(e));
    }
    cv.push_back(std::move(row));
  }
  nlohmann::json pv = nlohmann::json::array();
  for (int j = 0; j < providers(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < customers(); ++i) {
      nlohmann::json e = cell(intervals_.provider_view(j, i), ProviderCount(j, i));
      if (mode_ == ConfidenceMode::kLinear) {
        e["mean"] = customer_contexts_[i].dot(linear({Side::kProvider, j}).estimate);
      } else if (count_[Key(i, j)] > 0) {
        e["mean"] = provider_sum_[Key(i, j)] / count_[Key(i, j)];
      }
      row.push_back(std::move(e));
    }
    pv.push_back(std::move(row));
  }
  out["customer_view"] = std::move(cv);
  out["provider_view"] = std::move(pv);
  return out;
}

}  // namespace smb
