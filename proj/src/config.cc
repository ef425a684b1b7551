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

#include "smb/config.h"

#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "smb/error.h"

namespace smb {
namespace {

using nlohmann::json;

// Locates keys in the raw text so that semantic errors can name a line.
class Locator {
 public:
  Locator(const std::string& text, std::string source)
      : text_(text), source_(std::move(source)) {}

  // Line of the last key of `path`, searching each key after the previous
  // one; falls back to the deepest key found.
  int LineOf(const std::vector<std::string>& path) const {
    size_t pos = 0;
    size_t found = std::string::npos;
    for (const std::string& key : path) {
      const size_t at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      found = at;
      pos = at + key.size() + 2;
    }
    if (found == std::string::npos) return 1;
    return LineAtOffset(found);
  }

  int LineAtOffset(size_t offset) const {
    int line = 1;
    for (size_t k = 0; k < offset && k < text_.size(); ++k) {
      line += text_[k] == '\n';
    }
    return line;
  }

  [[noreturn]] void Fail(const std::vector<std::string>& path,
                         const std::string& message) const {
    FailAt(LineOf(path), message);
  }

  [[noreturn]] void FailAt(int line, const std::string& message) const {
    throw Error(ErrorCode::kConfigError,
                source_ + ":" + std::to_string(line) + ": " + message);
  }

 private:
  const std::string& text_;
  std::string source_;
};

std::string Join(const std::vector<std::string>& path) {
  std::string out;
  for (const std::string& p : path) out += (out.empty() ? "" : ".") + p;
  return out;
}

void CheckKeys(const Locator& loc, const json& obj,
               const std::vector<std::string>& path,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) loc.Fail(path, "'" + Join(path) + "' must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) {
      std::vector<std::string> at = path;
      at.push_back(key);
      loc.Fail(at, "unknown key '" + Join(at) + "'");
    }
  }
}

template <typename T>
T Get(const Locator& loc, const json& obj, std::vector<std::string> path,
      const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  path.push_back(key);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    loc.Fail(path, "'" + Join(path) + "' has the wrong type");
  }
}

std::vector<std::vector<double>> GetMatrix(const Locator& loc, const json& obj,
                                           std::vector<std::string> path,
                                           const std::string& key) {
  path.push_back(key);
  if (!obj.contains(key)) loc.Fail(path, "missing '" + Join(path) + "'");
  try {
    return obj.at(key).get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    loc.Fail(path, "'" + Join(path) + "' must be a matrix of numbers");
  }
}

InstanceClass ParseClass(const Locator& loc, const std::string& name) {
  if (name == "unstructured") return InstanceClass::kUnstructured;
  if (name == "typed") return InstanceClass::kTyped;
  if (name == "linear") return InstanceClass::kLinear;
  if (name == "hard") return InstanceClass::kHard;
  if (name == "fixed") return InstanceClass::kFixed;
  loc.Fail({"instance", "class"}, "unknown instance class '" + name + "'");
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& text,
                             const std::string& source) {
  const Locator loc(text, source);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    loc.FailAt(loc.LineAtOffset(e.byte == 0 ? 0 : e.byte - 1),
               "malformed JSON: " + std::string(e.what()));
  }
  CheckKeys(loc, root, {},
            {"schema", "instance", "policy", "horizon", "seeds", "arrival",
             "noise", "ntu", "output"});
  if (!root.contains("schema")) loc.FailAt(1, "missing 'schema'");
  const int schema = Get<int>(loc, root, {}, "schema", 0);
  if (schema != kConfigSchemaVersion) {
    loc.Fail({"schema"}, "unsupported schema version " +
                             std::to_string(schema) + " (expected " +
                             std::to_string(kConfigSchemaVersion) + ")");
  }

  ExperimentConfig cfg;
  InstanceSpec& inst = cfg.instance;
  const json instance = root.value("instance", json::object());
  CheckKeys(loc, instance, {"instance"},
            {"class", "customers", "providers", "types", "dim", "K", "rho",
             "customer_utilities", "provider_utilities", "instance_seed"});
  inst.instance_class = ParseClass(
      loc, Get<std::string>(loc, instance, {"instance"}, "class", "unstructured"));
  inst.customers = Get<int>(loc, instance, {"instance"}, "customers", 3);
  inst.providers = Get<int>(loc, instance, {"instance"}, "providers", 3);
  inst.types = Get<int>(loc, instance, {"instance"}, "types", 3);
  inst.dim = Get<int>(loc, instance, {"instance"}, "dim", 3);
  inst.hard_customers = Get<int>(loc, instance, {"instance"}, "K", 2);
  if (instance.contains("rho") && !instance["rho"].is_null()) {
    inst.rho = Get<double>(loc, instance, {"instance"}, "rho", 0.0);
  }
  if (instance.contains("instance_seed")) {
    inst.instance_seed =
        Get<uint64_t>(loc, instance, {"instance"}, "instance_seed", 0);
  }
  if (inst.instance_class == InstanceClass::kFixed) {
    const auto cu = GetMatrix(loc, instance, {"instance"}, "customer_utilities");
    const auto pu = GetMatrix(loc, instance, {"instance"}, "provider_utilities");
    try {
      inst.fixed = UtilityMatrix::FromRows(cu, pu);
    } catch (const Error& e) {
      loc.Fail({"instance", "provider_utilities"}, e.message());
    }
    if (inst.fixed.customers() == 0 || inst.fixed.providers() == 0) {
      loc.Fail({"instance", "customer_utilities"}, "fixed market is empty");
    }
  } else if (instance.contains("customer_utilities") ||
             instance.contains("provider_utilities")) {
    loc.Fail({"instance", "customer_utilities"},
             "utility matrices require class 'fixed'");
  }
  if (inst.instance_class != InstanceClass::kFixed &&
      inst.instance_class != InstanceClass::kHard &&
      (inst.customers < 1 || inst.providers < 1)) {
    loc.Fail({"instance", "customers"},
             "customers and providers must be positive");
  }

  const json policy = root.value("policy", json::object());
  CheckKeys(loc, policy, {"policy"},
            {"kind", "ucb_scale", "beta_dim_coef", "beta_log_coef", "ridge",
             "epsilon", "etc_budget"});
  const bool ntu = Get<bool>(loc, root, {}, "ntu", false);
  const std::string default_kind = ntu ? "match_ntu_ucb" : "match_ucb";
  const std::string kind =
      Get<std::string>(loc, policy, {"policy"}, "kind", default_kind);
  try {
    cfg.policy.policy.kind = ParsePolicyKind(kind);
  } catch (const Error&) {
    loc.Fail({"policy", "kind"}, "unknown policy kind '" + kind + "'");
  }
  if (ntu != (cfg.policy.policy.kind == PolicyKind::kMatchNtuUcb)) {
    loc.Fail({"ntu"}, "'ntu' must be true exactly for kind 'match_ntu_ucb'");
  }
  ConfidenceParams& cp = cfg.policy.confidence;
  cp.ucb_scale = Get<double>(loc, policy, {"policy"}, "ucb_scale", cp.ucb_scale);
  cp.beta_dim_coef =
      Get<double>(loc, policy, {"policy"}, "beta_dim_coef", cp.beta_dim_coef);
  cp.beta_log_coef =
      Get<double>(loc, policy, {"policy"}, "beta_log_coef", cp.beta_log_coef);
  cp.ridge = Get<double>(loc, policy, {"policy"}, "ridge", cp.ridge);
  cfg.policy.policy.epsilon =
      Get<double>(loc, policy, {"policy"}, "epsilon", cfg.policy.policy.epsilon);
  cfg.policy.policy.etc_budget =
      Get<int>(loc, policy, {"policy"}, "etc_budget", 0);
  if (cp.ucb_scale < 0) loc.Fail({"policy", "ucb_scale"}, "ucb_scale must be >= 0");
  if (!(cp.ridge > 0)) loc.Fail({"policy", "ridge"}, "ridge must be positive");
  if (!(cfg.policy.policy.epsilon > 0)) {
    loc.Fail({"policy", "epsilon"}, "epsilon must be positive");
  }
  if (cfg.policy.policy.etc_budget < 0) {
    loc.Fail({"policy", "etc_budget"}, "etc_budget must be >= 0");
  }

  cfg.horizon = Get<int>(loc, root, {}, "horizon", cfg.horizon);
  if (cfg.horizon < 1) loc.Fail({"horizon"}, "horizon must be >= 1");
  inst.hard_horizon = cfg.horizon;
  if (!root.contains("seeds")) loc.FailAt(1, "missing 'seeds'");
  cfg.seeds = Get<std::vector<uint64_t>>(loc, root, {}, "seeds", {});
  if (cfg.seeds.empty()) loc.Fail({"seeds"}, "seed list is empty");

  const json arrival = root.value("arrival", json::object());
  CheckKeys(loc, arrival, {"arrival"}, {"mode", "p", "schedule"});
  const std::string mode =
      Get<std::string>(loc, arrival, {"arrival"}, "mode", "all");
  if (mode == "all") {
    inst.arrival.mode = ArrivalMode::kAllEveryRound;
  } else if (mode == "iid") {
    inst.arrival.mode = ArrivalMode::kIidSubset;
    inst.arrival.probability = Get<double>(loc, arrival, {"arrival"}, "p", 0.5);
    if (!(inst.arrival.probability >= 0 && inst.arrival.probability <= 1)) {
      loc.Fail({"arrival", "p"}, "p must lie in [0, 1]");
    }
  } else if (mode == "schedule") {
    inst.arrival.mode = ArrivalMode::kFixedSchedule;
    if (!arrival.contains("schedule") || !arrival["schedule"].is_array() ||
        arrival["schedule"].empty()) {
      loc.Fail({"arrival", "schedule"}, "schedule must be a non-empty array");
    }
    for (const json& round : arrival["schedule"]) {
      CheckKeys(loc, round, {"arrival", "schedule"}, {"customers", "providers"});
      Arrivals a;
      a.customers = Get<std::vector<int>>(loc, round, {"arrival", "schedule"},
                                          "customers", {});
      a.providers = Get<std::vector<int>>(loc, round, {"arrival", "schedule"},
                                          "providers", {});
      inst.arrival.schedule.push_back(std::move(a));
    }
  } else {
    loc.Fail({"arrival", "mode"}, "unknown arrival mode '" + mode + "'");
  }

  if (root.contains("noise")) {
    const std::string noise = Get<std::string>(loc, root, {}, "noise", "");
    if (noise == "gaussian") {
      inst.noise = NoiseModel::kGaussian;
    } else if (noise == "bernoulli") {
      inst.noise = NoiseModel::kBernoulli;
    } else {
      loc.Fail({"noise"}, "unknown noise model '" + noise + "'");
    }
  }

  const json output = root.value("output", json::object());
  CheckKeys(loc, output, {"output"}, {"trace_csv", "summary_json"});
  cfg.output.trace_csv =
      Get<std::string>(loc, output, {"output"}, "trace_csv", cfg.output.trace_csv);
  cfg.output.summary_json = Get<std::string>(loc, output, {"output"},
                                             "summary_json",
                                             cfg.output.summary_json);

  // Instance-level checks (ranges, schedules, policy compatibility) run on
  // the first seed so that they report against the configuration.
  std::optional<MarketInstance> probe;
  try {
    probe = GenInstance(inst, cfg.seeds.front());
  } catch (const Error& e) {
    loc.Fail({"instance"}, e.message());
  }
  try {
    Policy check(cfg.policy.policy, probe->MakeConfidence(cp), cfg.horizon);
  } catch (const Error& e) {
    loc.Fail({"policy"}, e.message());
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kConfigError, path + ": cannot open file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), path);
}

std::string ConfigReference() {
  return R"(Configuration (JSON, "schema": 1). Unknown keys are rejected.
  schema                      required, must be 1
  instance.class              unstructured | typed | linear | hard | fixed (unstructured)
  instance.customers          customers per market (3)
  instance.providers          providers per market (3)
  instance.types              number of types for class typed (3)
  instance.dim                context dimension for class linear (3)
  instance.K                  customers of the hard family (2)
  instance.rho                reward gap of the hard family (sqrt(K / horizon))
  instance.customer_utilities customers x providers matrix for class fixed
  instance.provider_utilities providers x customers matrix for class fixed
  instance.instance_seed      share one instance across seeds (each seed draws its own)
  policy.kind                 match_ucb | match_typed_ucb | match_lin_ucb |
                              match_ucb_prime | match_ntu_ucb | etc |
                              revenue_frictions (match_ucb)
  policy.ucb_scale            interval multiplier (8)
  policy.beta_dim_coef        linear radius coefficient on d log(1 + T) (4)
  policy.beta_log_coef        linear radius coefficient on log(|A| T) (8)
  policy.ridge                linear ridge regularizer (1)
  policy.epsilon              per-agent charge of revenue_frictions (0.1)
  policy.etc_budget           explorations per pair, 0 = automatic (0)
  horizon                     rounds per run (1000)
  seeds                       required, non-empty list of run seeds
  arrival.mode                all | iid | schedule (all)
  arrival.p                   arrival probability for iid (0.5)
  arrival.schedule            [{"customers": [...], "providers": [...]}, ...], cycled
  noise                       gaussian | bernoulli (gaussian; bernoulli for hard)
  ntu                         true for match_ntu_ucb (false)
  output.trace_csv            trace path, relative to --out (trace.csv)
  output.summary_json         summary path, relative to --out (summary.json)
)";
}

}  // namespace smb
