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

#ifndef SMB_CONFIG_H_
#define SMB_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "smb/environment.h"

namespace smb {

struct OutputConfig {
  std::string trace_csv = "trace.csv";
  std::string summary_json = "summary.json";
};

struct ExperimentConfig {
  InstanceSpec instance;
  PolicySpec policy;
  int horizon = 1000;
  std::vector<uint64_t> seeds;
  OutputConfig output;
};

inline constexpr int kConfigSchemaVersion = 1;

// Parses and validates a JSON experiment configuration. Errors throw
// Error(kConfigError) with a "<source>:<line>: <message>" description.
ExperimentConfig ParseConfig(const std::string& text,
                             const std::string& source = "<config>");

// Reads and parses a configuration file.
ExperimentConfig LoadConfig(const std::string& path);

// Human-readable description of every key and its default.
std::string ConfigReference();

}  // namespace smb

#endif  // SMB_CONFIG_H_
