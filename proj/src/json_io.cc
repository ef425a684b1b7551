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

#include "smb/json_io.h"

#include <cmath>
#include <cstdio>

#include "smb/error.h"
#include "smb/instability.h"

namespace smb {
namespace {

using nlohmann::json;

json AgentsToJson(const std::vector<AgentId>& agents) {
  json out = json::array();
  for (const AgentId& a : agents) {
    out.push_back({{"side", a.side == Side::kCustomer ? "customer" : "provider"},
                   {"index", a.index}});
  }
  return out;
}

json VectorToJson(const AgentVector& v) {
  return {{"customers", v.customers}, {"providers", v.providers},
          {"total", v.Sum()}};
}

[[noreturn]] void BadOutcome(const std::string& message) {
  throw Error(ErrorCode::kInvalidOutcome, "outcome: " + message);
}

std::vector<double> ReadTransfers(const json& t, const char* key, int size) {
  if (!t.contains(key)) return std::vector<double>(size, 0.0);
  std::vector<double> out;
  try {
    out = t.at(key).get<std::vector<double>>();
  } catch (const json::exception&) {
    BadOutcome(std::string("transfers.") + key + " must be a list of numbers");
  }
  if (static_cast<int>(out.size()) != size) {
    BadOutcome(std::string("transfers.") + key + " must have " +
               std::to_string(size) + " entries");
  }
  for (double x : out) {
    if (!std::isfinite(x)) BadOutcome("transfers must be finite");
  }
  return out;
}

}  // namespace

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

UtilityMatrix UtilityMatrixFromJson(const json& j) {
  if (!j.is_object() || !j.contains("customer_utilities") ||
      !j.contains("provider_utilities")) {
    throw Error(ErrorCode::kConfigError,
                "instance: expected customer_utilities and provider_utilities");
  }
  std::vector<std::vector<double>> cu, pu;
  try {
    cu = j.at("customer_utilities").get<std::vector<std::vector<double>>>();
    pu = j.at("provider_utilities").get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kConfigError,
                "instance: utilities must be matrices of numbers");
  }
  return UtilityMatrix::FromRows(cu, pu);
}

ScoredOutcome OutcomeFromJson(const json& j, int customers, int providers) {
  if (!j.is_object()) BadOutcome("expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "mode" && key != "pairs" && key != "transfers") {
      BadOutcome("unknown key '" + key + "'");
    }
  }
  ScoredOutcome s;
  std::string mode = "tu";
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) BadOutcome("mode must be a string");
    mode = j["mode"].get<std::string>();
  }
  if (mode != "tu" && mode != "ntu") BadOutcome("mode must be 'tu' or 'ntu'");
  s.ntu = mode == "ntu";
  if (!j.contains("pairs") || !j["pairs"].is_array()) {
    BadOutcome("missing 'pairs' list");
  }
  Matching m(customers, providers);
  for (const json& p : j["pairs"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
        !p[1].is_number_integer()) {
      BadOutcome("each pair must be [customer, provider]");
    }
    const int i = p[0].get<int>();
    const int k = p[1].get<int>();
    if (i < 0 || i >= customers || k < 0 || k >= providers) {
      BadOutcome("pair index out of range");
    }
    m.Add(i, k);
  }
  s.outcome = MarketOutcome::WithoutTransfers(m);
  if (j.contains("transfers")) {
    const json& t = j["transfers"];
    if (!t.is_object()) BadOutcome("'transfers' must be an object");
    s.outcome.transfers.customers = ReadTransfers(t, "customers", customers);
    s.outcome.transfers.providers = ReadTransfers(t, "providers", providers);
  }
  if (!s.ntu) RequireZeroSum(s.outcome, customers, providers);
  return s;
}

json OutcomeToJson(const MarketOutcome& outcome, bool ntu) {
  json pairs = json::array();
  for (const auto& [i, k] : outcome.matching.pairs()) pairs.push_back({i, k});
  return {{"mode", ntu ? "ntu" : "tu"},
          {"pairs", pairs},
          {"transfers",
           {{"customers", outcome.transfers.customers},
            {"providers", outcome.transfers.providers}}}};
}

json ScoreReport(const UtilityMatrix& u, const ScoredOutcome& s) {
  json out;
  if (s.ntu) {
    const NtuInstabilityReport r = NtuSubsetInstability(u, s.outcome.matching);
    out["mode"] = "ntu";
    out["instability"] = r.value;
    out["subsidies"] = VectorToJson(r.subsidies);
    out["utility_difference"] = UtilityDifference(
        u, MarketOutcome::WithoutTransfers(s.outcome.matching));
    out["is_stable"] = IsStableNtu(u, s.outcome.matching);
    return out;
  }
  const InstabilityReport r = SubsetInstability(u, s.outcome);
  const CoalitionResult c = MaxUnhappinessCoalition(u, s.outcome);
  out["mode"] = "tu";
  out["instability"] = r.value;
  out["utility_difference"] = UtilityDifference(u, s.outcome);
  out["subsidies"] = VectorToJson(r.subsidies);
  out["witness"] = AgentsToJson(r.witness_subset);
  out["coalition"] = {{"members", AgentsToJson(c.coalition)},
                      {"value", c.value},
                      {"deviation", OutcomeToJson(c.deviation, false)}};
  out["is_stable"] = IsStableTu(u, s.outcome);
  return out;
}

void WriteTraceCsv(const std::vector<RegretTrace>& traces, std::ostream& out) {
  out << kTraceCsvHeader << "\n";
  for (const RegretTrace& trace : traces) {
    for (const TraceRow& row : trace.rows) {
      out << row.round << ',' << trace.seed << ','
          << FormatDouble(row.instability) << ','
          << FormatDouble(row.cum_regret) << ','
          << FormatDouble(row.width_sum) << ',' << FormatDouble(row.revenue)
          << ',' << (row.bound_only ? 1 : 0) << '\n';
    }
  }
}

std::optional<double> LogLogSlope(const std::vector<double>& curve) {
  const size_t rounds = curve.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int points = 0;
  for (size_t t = (rounds + 1) / 2; t <= rounds; ++t) {
    if (t == 0 || !(curve[t - 1] > 0)) continue;
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(curve[t - 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++points;
  }
  const double denom = points * sxx - sx * sx;
  if (points < 2 || denom <= 0) return std::nullopt;
  return (points * sxy - sx * sy) / denom;
}

json SummaryJson(const SweepResult& result, const SweepCell& cell) {
  json out;
  out["policy"] = std::string(PolicyKindName(cell.policy.policy.kind));
  out["horizon"] = cell.horizon;
  out["seeds"] = cell.seeds;
  const auto last = [](const Curve& c) -> json {
    if (c.mean.empty()) return nullptr;
    return {{"mean", c.mean.back()}, {"stderr", c.stderr_.back()}};
  };
  out["final_cum_regret"] = last(result.cum_regret);
  out["final_cum_revenue"] = last(result.cum_revenue);
  const std::optional<double> slope = LogLogSlope(result.cum_regret.mean);
  out["log_log_slope"] = slope ? json(*slope) : json(nullptr);
  int bound_only = 0;
  for (const RegretTrace& t : result.traces) {
    for (const TraceRow& r : t.rows) bound_only += r.bound_only;
  }
  out["bound_only_rounds"] = bound_only;
  return out;
}

}  // namespace smb
