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

#ifndef SMB_CONFIDENCE_H_
#define SMB_CONFIDENCE_H_

#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "smb/intervals.h"
#include "smb/market.h"

namespace smb {

enum class ConfidenceMode { kUnstructured, kTyped, kLinear };

struct ConfidenceParams {
  // Multiplier on sqrt(log(|A| T) / n) in the unstructured and typed modes.
  double ucb_scale = 8.0;
  // Linear mode radius: beta = dim_coef * d * log(1 + T)
  //                            + log_coef * log(|A| T).
  double beta_dim_coef = 4.0;
  double beta_log_coef = 8.0;
  // Ridge regularizer of the linear least-squares estimate.
  double ridge = 1.0;
};

// One noisy utility observation reported by a matched agent.
struct Observation {
  AgentId agent;
  double reward = 0.0;
};

// Confidence intervals on every customer-provider utility, in both
// orientations, for one of the three preference classes.
class ConfidenceSets {
 public:
  static ConfidenceSets Unstructured(int customers, int providers,
                                     ConfidenceParams params = {});

  // Types index into [0, num_types). The interval on u_i(j) is shared by all
  // pairs with the same (customer type, provider type), and likewise for
  // u_j(i).
  static ConfidenceSets Typed(std::vector<int> customer_types,
                              std::vector<int> provider_types, int num_types,
                              ConfidenceParams params = {});

  // Contexts must lie in the unit ball; throws Error(kInvalidContext).
  static ConfidenceSets Linear(std::vector<Eigen::VectorXd> customer_contexts,
                               std::vector<Eigen::VectorXd> provider_contexts,
                               ConfidenceParams params = {});

  // Point intervals at `truth` that ignore all feedback. Oracle baseline.
  static ConfidenceSets Exact(const UtilityMatrix& truth);

  ConfidenceMode mode() const { return mode_; }
  const ConfidenceParams& params() const { return params_; }
  int customers() const { return intervals_.customers(); }
  int providers() const { return intervals_.providers(); }
  int agents() const { return customers() + providers(); }

  // Incorporates one round of semi-bandit feedback. Every matched agent must
  // report exactly once; anything else throws Error(kProtocolViolation).
  // `arrivals` drives the per-agent round counters of the linear mode.
  void Update(const Arrivals& arrivals, const Matching& matching,
              const std::vector<Observation>& feedback, int horizon);

  const IntervalTable& Snapshot() const { return intervals_; }
  UtilityMatrix UcbMatrix() const { return intervals_.Upper(); }
  double CustomerWidth(int i, int j) const {
    return intervals_.customer_view(i, j).width();
  }
  double ProviderWidth(int j, int i) const {
    return intervals_.provider_view(j, i).width();
  }
  double WidthSum(const Matching& m) const { return intervals_.WidthSum(m); }

  // Observation count behind the interval on u_i(j) (resp. u_j(i)).
  int CustomerCount(int i, int j) const;
  int ProviderCount(int j, int i) const;
  // Half-width before clipping; infinite while a pair is unobserved.
  double CustomerHalfWidth(int i, int j) const;
  double ProviderHalfWidth(int j, int i) const;

  // Linear mode only: the projected ridge estimate for an agent.
  Eigen::VectorXd Estimate(AgentId agent) const;
  // Linear mode only: the ellipsoid radius used at the last update.
  double Beta(AgentId agent) const;

  // {"customer_view": [[{lo, hi, n, mean}, ...]], "provider_view": ...}
  nlohmann::json ToJson() const;

 private:
  struct LinearAgent {
    Eigen::MatrixXd gram;  // ridge * I + sum c c^T
    Eigen::VectorXd moment;  // sum r c
    Eigen::VectorXd estimate;
    int observations = 0;
    int arrivals = 0;
    double beta = 0.0;
  };

  ConfidenceSets(ConfidenceMode mode, int customers, int providers,
                 ConfidenceParams params);

  void ValidateFeedback(const Matching& matching,
                        const std::vector<Observation>& feedback) const;
  double HalfWidth(int count, int horizon) const;
  void RefreshPair(int i, int j, int horizon);
  void RefreshLinear(AgentId agent, int horizon);
  int Key(int i, int j) const;
  LinearAgent& linear(AgentId a) {
    return linear_[a.side == Side::kCustomer ? a.index
                                             : customers() + a.index];
  }
  const LinearAgent& linear(AgentId a) const {
    return linear_[a.side == Side::kCustomer ? a.index
                                             : customers() + a.index];
  }

  ConfidenceMode mode_;
  ConfidenceParams params_;
  IntervalTable intervals_;
  int last_horizon_ = 1;
  bool frozen_ = false;

  // Unstructured and typed: statistics per key (pair or type pair).
  std::vector<int> count_;
  std::vector<double> customer_sum_;
  std::vector<double> provider_sum_;
  std::vector<int> customer_types_;
  std::vector<int> provider_types_;
  int num_types_ = 0;

  // Linear: per agent, customers first.
  std::vector<Eigen::VectorXd> customer_contexts_;
  std::vector<Eigen::VectorXd> provider_contexts_;
  std::vector<LinearAgent> linear_;
};

}  // namespace smb

#endif  // SMB_CONFIDENCE_H_
