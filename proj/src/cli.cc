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

#include "smb/cli.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smb/config.h"
#include "smb/environment.h"
#include "smb/error.h"
#include "smb/json_io.h"
#include "smb/verify.h"

namespace smb {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json ReadJsonFile(const std::string& path, ErrorCode code) {
  std::ifstream in(path);
  if (!in) throw Error(code, path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(code, path + ": malformed JSON: " + e.what());
  }
}

fs::path Resolve(const std::string& out_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : fs::path(out_dir) / p;
}

void WriteFile(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) {
    throw Error(ErrorCode::kConfigError,
                path.string() + ": cannot write output");
  }
}

}  // namespace

std::optional<int> ThreadsFromEnvironment() {
  const char* value = std::getenv("SMB_THREADS");
  if (value == nullptr || *value == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw Error(ErrorCode::kConfigError,
                std::string("SMB_THREADS must be a positive integer, got '") +
                    value + "'");
  }
  return static_cast<int>(n);
}

int RunCommand(const std::string& config_path, int threads,
               const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  try {
    const ExperimentConfig cfg = LoadConfig(config_path);
    SweepOptions options;
    options.threads = ThreadsFromEnvironment().value_or(threads);
    if (options.threads < 1) {
      throw Error(ErrorCode::kConfigError, "--threads must be >= 1");
    }
    const SweepCell cell{cfg.instance, cfg.policy, cfg.horizon, cfg.seeds};
    const auto start = std::chrono::steady_clock::now();
    const SweepResult result = Sweep({cell}, options).front();
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();

    std::ostringstream csv;
    WriteTraceCsv(result.traces, csv);
    const fs::path trace_path = Resolve(out_dir, cfg.output.trace_csv);
    WriteFile(trace_path, csv.str());
    const json summary = SummaryJson(result, cell);
    const fs::path summary_path = Resolve(out_dir, cfg.output.summary_json);
    WriteFile(summary_path, summary.dump(2) + "\n");

    out << summary.dump(2) << "\n";
    err << "wrote " << trace_path.string() << " and "
        << summary_path.string() << " (" << result.traces.size()
        << " seeds, " << seconds << " s)\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int ScoreCommand(const std::string& instance_path,
                 const std::string& outcome_path, std::ostream& out,
                 std::ostream& err) {
  try {
    const UtilityMatrix u = UtilityMatrixFromJson(
        ReadJsonFile(instance_path, ErrorCode::kConfigError));
    const ScoredOutcome s =
        OutcomeFromJson(ReadJsonFile(outcome_path, ErrorCode::kInvalidOutcome),
                        u.customers(), u.providers());
    out << ScoreReport(u, s).dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int VerifyCommand(uint64_t seed, int cases, std::ostream& out,
                  std::ostream& err) {
  try {
    const VerifyReport report = RunVerification(seed, cases);
    PrintReport(report, out);
    return report.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace smb
