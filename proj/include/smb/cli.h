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

#ifndef SMB_CLI_H_
#define SMB_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace smb {

// Runs every seed of the configured experiment and writes the trace CSV and
// summary JSON under `out_dir`. `threads` is replaced by SMB_THREADS when
// that variable is set. Returns a process exit code.
int RunCommand(const std::string& config_path, int threads,
               const std::string& out_dir, std::ostream& out,
               std::ostream& err);

// Prints the score report of an outcome file against an instance file.
int ScoreCommand(const std::string& instance_path,
                 const std::string& outcome_path, std::ostream& out,
                 std::ostream& err);

int VerifyCommand(uint64_t seed, int cases, std::ostream& out,
                  std::ostream& err);

// Value of SMB_THREADS, if set. Throws Error(kConfigError) when it is not a
// positive integer.
std::optional<int> ThreadsFromEnvironment();

}  // namespace smb

#endif  // SMB_CLI_H_
