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

#ifndef SMB_ENVIRONMENT_H_
#define SMB_ENVIRONMENT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "smb/algorithms.h"
#include "smb/confidence.h"
#include "smb/market.h"
#include "smb/rng.h"

namespace smb {

enum class InstanceClass { kUnstructured, kTyped, kLinear, kHard, kFixed };
enum class ArrivalMode { kAllEveryRound, kIidSubset, kFixedSchedule };
enum class NoiseModel { kGaussian, kBernoulli };

struct ArrivalProcess {
  ArrivalMode mode = ArrivalMode::kAllEveryRound;
  // Per-agent arrival probability for kIidSubset.
  double probability = 1.0;
  // Round t uses schedule[(t - 1) % size] for kFixedSchedule.
  std::vector<Arrivals> schedule;
};

struct MarketInstance {
  UtilityMatrix truth;
  InstanceClass instance_class = InstanceClass::kUnstructured;

  // Typed: types in [0, num_types) and role-aware type tables,
  // u_i(j) = customer_table[c_i][c_j], u_j(i) = provider_table[c_j][c_i].
  std::vector<int> customer_types;
  std::vector<int> provider_types;
  int num_types = 0;
  std::vector<std::vector<double>> customer_table;
  std::vector<std::vector<double>> provider_table;

  // Linear: u_a(b) = <phi_a, c_b>.
  std::vector<Eigen::VectorXd> customer_contexts;
  std::vector<Eigen::VectorXd> provider_contexts;
  std::vector<Eigen::VectorXd> customer_phi;
  std::vector<Eigen::VectorXd> provider_phi;

  // Hard family: alpha_i in 1..K, block size and reward gap.
  std::vector<int> alpha;
  int block_size = 0;
  double rho = 0.0;

  ArrivalProcess arrival;
  NoiseModel noise = NoiseModel::kGaussian;
  double noise_sigma = 1.0;
  uint64_t seed = 0;

  // Fresh confidence sets of the class's natural mode. Hard and fixed
  // instances use the unstructured mode.
  ConfidenceSets MakeConfidence(ConfidenceParams params) const;

  nlohmann::json ToJson() const;
};

struct InstanceSpec {
  InstanceClass instance_class = InstanceClass::kUnstructured;
  int customers = 3;
  int providers = 3;
  int types = 3;
  int dim = 3;
  // Hard family.
  int hard_customers = 2;
  int hard_horizon = 100;
  std::optional<double> rho;
  // Fixed instances.
  UtilityMatrix fixed;
  // When set, every replica shares the instance drawn from this seed.
  std::optional<uint64_t> instance_seed;

  ArrivalProcess arrival;
  std::optional<NoiseModel> noise;
};

// Draws an instance deterministically from `seed`. Throws
// Error(kConfigError) on invalid sizes.
MarketInstance GenInstance(const InstanceSpec& spec, uint64_t seed);

// Lower-bound family with K customers and 10 K ceil(ln(K T)) providers.
MarketInstance GenHardInstance(int customers, int horizon, uint64_t seed,
                               std::optional<double> rho = std::nullopt);

// Feedback channel backed by the true utilities plus noise.
class NoisyFeedback : public FeedbackChannel {
 public:
  NoisyFeedback(const MarketInstance& instance, uint64_t stream_seed);
  std::vector<Observation> Observe(const Matching& matching) override;

 private:
  const MarketInstance& instance_;
  Stream stream_;
};

// Arrivals for round t (1-based).
Arrivals DrawArrivals(const MarketInstance& instance, int round,
                      Stream& stream);

struct TraceRow {
  int round = 0;
  double instability = 0.0;
  double width_sum = 0.0;
  double certified_bound = 0.0;
  double revenue = 0.0;
  // Instability is the certified bound rather than the exact value.
  bool bound_only = false;
  // All intervals used this round contained the truth.
  bool contained = false;
  // The scored outcome is unstable for the truth.
  bool unstable = false;
  double cum_regret = 0.0;
  double cum_revenue = 0.0;
};

struct RegretTrace {
  uint64_t seed = 0;
  std::vector<TraceRow> rows;
  double wall_seconds = 0.0;
  // Filled when RunOptions::record_outcomes is set.
  std::vector<MarketOutcome> outcomes;
  std::vector<Arrivals> arrivals;

  double final_regret() const {
    return rows.empty() ? 0.0 : rows.back().cum_regret;
  }
};

struct RunOptions {
  bool record_outcomes = false;
  // Called after each round is scored.
  std::function<void(const RoundDecision&, const TraceRow&)> observer;
};

struct PolicySpec {
  PolicyConfig policy;
  ConfidenceParams confidence;
};

// Scores a logged outcome against the truth on the arrived agents.
// Returns {instability, bound_only}.
std::pair<double, bool> ScoreOutcome(const MarketInstance& instance,
                                     const MarketOutcome& outcome,
                                     const Arrivals& arrivals, bool ntu,
                                     double certified_bound);

// Plays `horizon` rounds. Deterministic in (instance, spec, horizon, seed).
RegretTrace Run(const MarketInstance& instance, const PolicySpec& spec,
                int horizon, uint64_t seed, const RunOptions& options = {});

// Same as Run, with a caller-supplied policy (for example one whose
// confidence sets were prepared in advance).
RegretTrace RunPolicy(const MarketInstance& instance, Policy& policy,
                      int horizon, uint64_t seed,
                      const RunOptions& options = {});

struct Curve {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

// Per-round mean and standard error across traces of equal length.
Curve AggregateCumRegret(const std::vector<RegretTrace>& traces);
Curve AggregateCumRevenue(const std::vector<RegretTrace>& traces);

struct SweepCell {
  InstanceSpec instance;
  PolicySpec policy;
  int horizon = 1000;
  std::vector<uint64_t> seeds;
};

struct SweepResult {
  std::vector<RegretTrace> traces;  // in seed order
  Curve cum_regret;
  Curve cum_revenue;
};

struct SweepOptions {
  int threads = 1;
  // Upper bound on sum over replicas of horizon.
  int64_t max_total_rounds = 200'000'000;
};

// Runs every (cell, seed) replica, concurrently when threads > 1. Results
// do not depend on the thread count. Throws Error(kConfigError) when the
// total number of rounds exceeds the guard.
std::vector<SweepResult> Sweep(const std::vector<SweepCell>& cells,
                               const SweepOptions& options = {});

}  // namespace smb

#endif  // SMB_ENVIRONMENT_H_
