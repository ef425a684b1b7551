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

#ifndef SMB_JSON_IO_H_
#define SMB_JSON_IO_H_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "smb/environment.h"
#include "smb/market.h"

namespace smb {

// Shortest form that round-trips: 17 significant digits.
std::string FormatDouble(double x);

// {"customer_utilities": m x n, "provider_utilities": n x m}. Other keys,
// such as those of an instance snapshot, are ignored. Throws
// Error(kConfigError) when the matrices are missing or inconsistent.
UtilityMatrix UtilityMatrixFromJson(const nlohmann::json& j);

struct ScoredOutcome {
  MarketOutcome outcome;
  bool ntu = false;
};

// {"mode": "tu" | "ntu", "pairs": [[i, j], ...],
//  "transfers": {"customers": [...], "providers": [...]}}.
// Transfers default to zero. Throws Error(kInvalidOutcome) on malformed input.
ScoredOutcome OutcomeFromJson(const nlohmann::json& j, int customers,
                              int providers);

nlohmann::json OutcomeToJson(const MarketOutcome& outcome, bool ntu);

// Instability, witnesses and utility difference of an outcome.
nlohmann::json ScoreReport(const UtilityMatrix& u, const ScoredOutcome& s);

inline constexpr char kTraceCsvHeader[] =
    "round,seed,instability,cum_regret,width_sum,revenue,bound_only";

// Seed-major, round-minor rows under kTraceCsvHeader.
void WriteTraceCsv(const std::vector<RegretTrace>& traces, std::ostream& out);

// Least-squares slope of log(curve[t - 1]) against log(t) over the last half
// of the rounds, skipping nonpositive values. Empty when fewer than two
// points remain.
std::optional<double> LogLogSlope(const std::vector<double>& curve);

nlohmann::json SummaryJson(const SweepResult& result, const SweepCell& cell);

}  // namespace smb

#endif  // SMB_JSON_IO_H_
