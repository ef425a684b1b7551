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

#include "smb/environment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "smb/error.h"
#include "smb/instability.h"

namespace smb {
namespace {

Eigen::VectorXd RandomBallPoint(Stream& s, int dim) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int k = 0; k < dim; ++k) v(k) = s.Normal();
    norm = v.norm();
  }
  return v / norm * s.Uniform();
}

std::string ClassName(InstanceClass c) {
  switch (c) {
    case InstanceClass::kUnstructured:
      return "unstructured";
    case InstanceClass::kTyped:
      return "typed";
    case InstanceClass::kLinear:
      return "linear";
    case InstanceClass::kHard:
      return "hard";
    case InstanceClass::kFixed:
      return "fixed";
  }
  return "unknown";
}

nlohmann::json VectorsToJson(const std::vector<Eigen::VectorXd>& vs) {
  nlohmann::json out = nlohmann::json::array();
  for (const Eigen::VectorXd& v : vs) {
    out.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  return out;
}

void CheckBernoulliRange(const UtilityMatrix& u) {
  for (int i = 0; i < u.customers(); ++i) {
    for (int j = 0; j < u.providers(); ++j) {
      const double a = u.customer_utility(i, j);
      const double b = u.provider_utility(j, i);
      if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) {
        throw Error(ErrorCode::kConfigError,
                    "Bernoulli noise needs utilities in [0, 1]");
      }
    }
  }
}

}  // namespace

ConfidenceSets MarketInstance::MakeConfidence(ConfidenceParams params) const {
  switch (instance_class) {
    case InstanceClass::kTyped:
      return ConfidenceSets::Typed(customer_types, provider_types, num_types,
                                   params);
    case InstanceClass::kLinear:
      return ConfidenceSets::Linear(customer_contexts, provider_contexts,
                                    params);
    default:
      return ConfidenceSets::Unstructured(truth.customers(), truth.providers(),
                                          params);
  }
}

nlohmann::json MarketInstance::ToJson() const {
  nlohmann::json out;
  out["class"] = ClassName(instance_class);
  out["seed"] = seed;
  nlohmann::json cu = nlohmann::json::array();
  for (int i = 0; i < truth.customers(); ++i) {
    std::vector<double> row(truth.providers());
    for (int j = 0; j < truth.providers(); ++j) row[j] = truth.customer_utility(i, j);
    cu.push_back(row);
  }
  nlohmann::json pu = nlohmann::json::array();
  for (int j = 0; j < truth.providers(); ++j) {
    std::vector<double> row(truth.customers());
    for (int i = 0; i < truth.customers(); ++i) row[i] = truth.provider_utility(j, i);
    pu.push_back(row);
  }
  out["customer_utilities"] = std::move(cu);
  out["provider_utilities"] = std::move(pu);
  if (instance_class == InstanceClass::kTyped) {
    out["customer_types"] = customer_types;
    out["provider_types"] = provider_types;
    out["customer_table"] = customer_table;
    out["provider_table"] = provider_table;
  } else if (instance_class == InstanceClass::kLinear) {
    out["customer_contexts"] = VectorsToJson(customer_contexts);
    out["provider_contexts"] = VectorsToJson(provider_contexts);
    out["customer_phi"] = VectorsToJson(customer_phi);
    out["provider_phi"] = VectorsToJson(provider_phi);
  } else if (instance_class == InstanceClass::kHard) {
    out["alpha"] = alpha;
    out["block_size"] = block_size;
    out["rho"] = rho;
  }
  out["noise"] = noise == NoiseModel::kGaussian ? "gaussian" : "bernoulli";
  return out;
}

MarketInstance GenInstance(const InstanceSpec& spec, uint64_t seed) {
  const uint64_t instance_seed = spec.instance_seed.value_or(seed);
  MarketInstance inst;
  if (spec.instance_class == InstanceClass::kHard) {
    inst = GenHardInstance(spec.hard_customers, spec.hard_horizon,
                           instance_seed, spec.rho);
  } else {
    inst.seed = instance_seed;
    inst.instance_class = spec.instance_class;
    Stream s(SplitSeed(instance_seed, 0));
    const int m = spec.instance_class == InstanceClass::kFixed
                      ? spec.fixed.customers()
                      : spec.customers;
    const int n = spec.instance_class == InstanceClass::kFixed
                      ? spec.fixed.providers()
                      : spec.providers;
    if (m < 1 || n < 1) {
      throw Error(ErrorCode::kConfigError,
                  "customers and providers must be positive");
    }
    inst.truth = UtilityMatrix(m, n);
    switch (spec.instance_class) {
      case InstanceClass::kFixed:
        inst.truth = spec.fixed;
        break;
      case InstanceClass::kUnstructured:
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < n; ++j) {
            inst.truth.set_customer_utility(i, j, s.Uniform(-1.0, 1.0));
          }
        }
        for (int j = 0; j < n; ++j) {
          for (int i = 0; i < m; ++i) {
            inst.truth.set_provider_utility(j, i, s.Uniform(-1.0, 1.0));
          }
        }
        break;
      case InstanceClass::kTyped: {
        const int k = spec.types;
        if (k < 1) throw Error(ErrorCode::kConfigError, "types must be >= 1");
        inst.num_types = k;
        inst.customer_table.assign(k, std::vector<double>(k));
        inst.provider_table.assign(k, std::vector<double>(k));
        for (auto& row : inst.customer_table) {
          for (double& v : row) v = s.Uniform(-1.0, 1.0);
        }
        for (auto& row : inst.provider_table) {
          for (double& v : row) v = s.Uniform(-1.0, 1.0);
        }
        inst.customer_types.resize(m);
        inst.provider_types.resize(n);
        for (int& t : inst.customer_types) t = s.Index(k);
        for (int& t : inst.provider_types) t = s.Index(k);
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < n; ++j) {
            const int ci = inst.customer_types[i];
            const int cj = inst.provider_types[j];
            inst.truth.set_customer_utility(i, j, inst.customer_table[ci][cj]);
            inst.truth.set_provider_utility(j, i, inst.provider_table[cj][ci]);
          }
        }
        break;
      }
      case InstanceClass::kLinear: {
        const int d = spec.dim;
        if (d < 1) throw Error(ErrorCode::kConfigError, "dim must be >= 1");
        for (int i = 0; i < m; ++i) {
          inst.customer_phi.push_back(RandomBallPoint(s, d));
          inst.customer_contexts.push_back(RandomBallPoint(s, d));
        }
        for (int j = 0; j < n; ++j) {
          inst.provider_phi.push_back(RandomBallPoint(s, d));
          inst.provider_contexts.push_back(RandomBallPoint(s, d));
        }
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < n; ++j) {
            inst.truth.set_customer_utility(
                i, j, inst.customer_phi[i].dot(inst.provider_contexts[j]));
            inst.truth.set_provider_utility(
                j, i, inst.provider_phi[j].dot(inst.customer_contexts[i]));
          }
        }
        break;
      }
      case InstanceClass::kHard:
        break;
    }
  }
  inst.arrival = spec.arrival;
  if (spec.noise) inst.noise = *spec.noise;
  if (inst.noise == NoiseModel::kBernoulli) CheckBernoulliRange(inst.truth);
  if (inst.arrival.mode == ArrivalMode::kIidSubset &&
      !(inst.arrival.probability >= 0.0 && inst.arrival.probability <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "arrival probability outside [0, 1]");
  }
  if (inst.arrival.mode == ArrivalMode::kFixedSchedule) {
    if (inst.arrival.schedule.empty()) {
      throw Error(ErrorCode::kConfigError, "arrival schedule is empty");
    }
    for (const Arrivals& a : inst.arrival.schedule) {
      for (int i : a.customers) {
        if (i < 0 || i >= inst.truth.customers()) {
          throw Error(ErrorCode::kConfigError, "scheduled customer out of range");
        }
      }
      for (int j : a.providers) {
        if (j < 0 || j >= inst.truth.providers()) {
          throw Error(ErrorCode::kConfigError, "scheduled provider out of range");
        }
      }
    }
  }
  return inst;
}

MarketInstance GenHardInstance(int customers, int horizon, uint64_t seed,
                               std::optional<double> rho) {
  if (customers < 2) throw Error(ErrorCode::kConfigError, "K must be >= 2");
  if (horizon < 1) throw Error(ErrorCode::kConfigError, "T must be >= 1");
  const double k = customers;
  MarketInstance inst;
  inst.instance_class = InstanceClass::kHard;
  inst.seed = seed;
  inst.noise = NoiseModel::kBernoulli;
  inst.rho = rho.value_or(std::sqrt(k / horizon));
  if (!(inst.rho >= 0.0 && inst.rho <= 0.5)) {
    throw Error(ErrorCode::kConfigError, "rho must lie in [0, 0.5]");
  }
  const int providers =
      10 * customers * static_cast<int>(std::ceil(std::log(k * horizon)));
  inst.block_size = std::max(1, static_cast<int>(std::ceil(std::log(k))));
  inst.truth = UtilityMatrix(customers, providers);
  Stream s(SplitSeed(seed, 0));
  inst.alpha.resize(customers);
  for (int i = 0; i < customers; ++i) {
    inst.alpha[i] = 1 + s.Index(customers);
    for (int j = 1; j <= providers; ++j) {
      const bool in_block = (j - 1) / inst.block_size == inst.alpha[i];
      inst.truth.set_customer_utility(i, j - 1,
                                      in_block ? 0.5 + inst.rho : 0.5);
    }
  }
  return inst;
}

NoisyFeedback::NoisyFeedback(const MarketInstance& instance,
                             uint64_t stream_seed)
    : instance_(instance), stream_(stream_seed) {}

std::vector<Observation> NoisyFeedback::Observe(const Matching& matching) {
  std::vector<Observation> out;
  out.reserve(2 * matching.size());
  auto draw = [&](double mean) {
    if (instance_.noise == NoiseModel::kBernoulli) {
      return stream_.Bernoulli(mean) ? 1.0 : 0.0;
    }
    return mean + instance_.noise_sigma * stream_.Normal();
  };
  for (const auto& [i, j] : matching.pairs()) {
    out.push_back({{Side::kCustomer, i},
                   draw(instance_.truth.customer_utility(i, j))});
    out.push_back({{Side::kProvider, j},
                   draw(instance_.truth.provider_utility(j, i))});
  }
  return out;
}

Arrivals DrawArrivals(const MarketInstance& instance, int round,
                      Stream& stream) {
  const int m = instance.truth.customers();
  const int n = instance.truth.providers();
  switch (instance.arrival.mode) {
    case ArrivalMode::kAllEveryRound:
      return Arrivals::All(m, n);
    case ArrivalMode::kIidSubset: {
      Arrivals a;
      for (int i = 0; i < m; ++i) {
        if (stream.Bernoulli(instance.arrival.probability)) a.customers.push_back(i);
      }
      for (int j = 0; j < n; ++j) {
        if (stream.Bernoulli(instance.arrival.probability)) a.providers.push_back(j);
      }
      return a;
    }
    case ArrivalMode::kFixedSchedule: {
      const auto& s = instance.arrival.schedule;
      return s[static_cast<size_t>(round - 1) % s.size()];
    }
  }
  return Arrivals::All(m, n);
}

std::pair<double, bool> ScoreOutcome(const MarketInstance& instance,
                                     const MarketOutcome& outcome,
                                     const Arrivals& arrivals, bool ntu,
                                     double certified_bound) {
  const UtilityMatrix sub =
      instance.truth.Restrict(arrivals.customers, arrivals.providers);
  std::vector<int> customer_slot(instance.truth.customers(), -1);
  std::vector<int> provider_slot(instance.truth.providers(), -1);
  for (size_t a = 0; a < arrivals.customers.size(); ++a) {
    customer_slot[arrivals.customers[a]] = static_cast<int>(a);
  }
  for (size_t b = 0; b < arrivals.providers.size(); ++b) {
    provider_slot[arrivals.providers[b]] = static_cast<int>(b);
  }
  MarketOutcome local = MarketOutcome::WithoutTransfers(
      Matching(sub.customers(), sub.providers()));
  for (const auto& [i, j] : outcome.matching.pairs()) {
    const int a = customer_slot[i];
    const int b = provider_slot[j];
    if (a < 0 || b < 0) {
      throw Error(ErrorCode::kInvalidOutcome,
                  "outcome matches an agent that did not arrive");
    }
    local.matching.Add(a, b);
    local.transfers.customers[a] = outcome.transfers.customers[i];
    local.transfers.providers[b] = outcome.transfers.providers[j];
  }
  if (!ntu) return {SubsetInstability(sub, local).value, false};
  if (sub.customers() <= 8) {
    return {NtuSubsetInstability(sub, local.matching).value, false};
  }
  return {certified_bound, true};
}

RegretTrace RunPolicy(const MarketInstance& instance, Policy& policy,
                      int horizon, uint64_t seed, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const bool ntu = policy.config().kind == PolicyKind::kMatchNtuUcb;
  NoisyFeedback feedback(instance, SplitSeed(seed, 1));
  Stream arrival_stream(SplitSeed(seed, 2));
  RegretTrace trace;
  trace.seed = seed;
  trace.rows.reserve(horizon);
  double cum_regret = 0.0;
  double cum_revenue = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const Arrivals arrivals = DrawArrivals(instance, t, arrival_stream);
    const RoundDecision d = policy.Step(arrivals, feedback);
    TraceRow row;
    row.round = t;
    const auto [instability, bound_only] =
        ScoreOutcome(instance, d.base_outcome, arrivals, ntu, d.certified_bound);
    row.instability = instability;
    row.bound_only = bound_only;
    row.unstable = !bound_only && instability > kTolerance;
    row.width_sum = d.width_sum;
    row.certified_bound = d.certified_bound;
    row.revenue = d.revenue;
    row.contained = d.intervals.Contains(instance.truth);
    cum_regret += instability;
    cum_revenue += d.revenue;
    row.cum_regret = cum_regret;
    row.cum_revenue = cum_revenue;
    if (options.record_outcomes) {
      trace.outcomes.push_back(d.base_outcome);
      trace.arrivals.push_back(arrivals);
    }
    if (options.observer) options.observer(d, row);
    trace.rows.push_back(row);
  }
  trace.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return trace;
}

RegretTrace Run(const MarketInstance& instance, const PolicySpec& spec,
                int horizon, uint64_t seed, const RunOptions& options) {
  Policy policy(spec.policy, instance.MakeConfidence(spec.confidence),
                horizon);
  return RunPolicy(instance, policy, horizon, seed, options);
}

namespace {

Curve Aggregate(const std::vector<RegretTrace>& traces,
                double TraceRow::*field) {
  Curve c;
  if (traces.empty()) return c;
  const size_t rounds = traces.front().rows.size();
  c.mean.assign(rounds, 0.0);
  c.stderr_.assign(rounds, 0.0);
  const double k = static_cast<double>(traces.size());
  for (size_t t = 0; t < rounds; ++t) {
    double sum = 0.0;
    for (const RegretTrace& tr : traces) sum += tr.rows[t].*field;
    const double mean = sum / k;
    double ss = 0.0;
    for (const RegretTrace& tr : traces) {
      const double dlt = tr.rows[t].*field - mean;
      ss += dlt * dlt;
    }
    c.mean[t] = mean;
    c.stderr_[t] = traces.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
  }
  return c;
}

}  // namespace

Curve AggregateCumRegret(const std::vector<RegretTrace>& traces) {
  return Aggregate(traces, &TraceRow::cum_regret);
}

Curve AggregateCumRevenue(const std::vector<RegretTrace>& traces) {
  return Aggregate(traces, &TraceRow::cum_revenue);
}

std::vector<SweepResult> Sweep(const std::vector<SweepCell>& cells,
                               const SweepOptions& options) {
  struct Job {
    size_t cell;
    size_t replica;
  };
  std::vector<Job> jobs;
  int64_t total_rounds = 0;
  std::vector<SweepResult> results(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].seeds.empty()) {
      throw Error(ErrorCode::kConfigError, "seed list is empty");
    }
    if (cells[c].horizon < 1) {
      throw Error(ErrorCode::kConfigError, "horizon must be >= 1");
    }
    results[c].traces.resize(cells[c].seeds.size());
    for (size_t r = 0; r < cells[c].seeds.size(); ++r) {
      jobs.push_back({c, r});
      total_rounds += cells[c].horizon;
    }
  }
  if (total_rounds > options.max_total_rounds) {
    throw Error(ErrorCode::kConfigError,
                "sweep requests " + std::to_string(total_rounds) +
                    " rounds, above the limit of " +
                    std::to_string(options.max_total_rounds));
  }
  // Validate every cell up front so configuration errors surface on the
  // calling thread.
  for (const SweepCell& cell : cells) {
    const MarketInstance inst = GenInstance(cell.instance, cell.seeds.front());
    Policy probe(cell.policy.policy,
                 inst.MakeConfidence(cell.policy.confidence), cell.horizon);
  }

  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto worker = [&]() {
    for (size_t k = next++; k < jobs.size(); k = next++) {
      const SweepCell& cell = cells[jobs[k].cell];
      const uint64_t seed = cell.seeds[jobs[k].replica];
      try {
        const MarketInstance inst = GenInstance(cell.instance, seed);
        results[jobs[k].cell].traces[jobs[k].replica] =
            Run(inst, cell.policy, cell.horizon, seed);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads,
                                                static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (SweepResult& r : results) {
    r.cum_regret = AggregateCumRegret(r.traces);
    r.cum_revenue = AggregateCumRevenue(r.traces);
  }
  return results;
}

}  // namespace smb
