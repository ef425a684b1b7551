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

// Command-line entry point: run, score and verify.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "smb/cli.h"
#include "smb/config.h"

int main(int argc, char** argv) {
  CLI::App app{"Simulator for stable matching markets with bandit feedback"};
  app.require_subcommand(1);
  app.footer("See 'smb run --help' for every configuration key and default.");

  std::string config_path;
  int threads = 1;
  std::string out_dir = ".";
  CLI::App* run = app.add_subcommand(
      "run", "Run an experiment configuration and write its traces");
  run->add_option("--config", config_path, "Path to the JSON configuration")
      ->required();
  run->add_option("--threads", threads,
                  "Worker threads; SMB_THREADS overrides this")
      ->capture_default_str();
  run->add_option("--out", out_dir, "Directory for relative output paths")
      ->capture_default_str();
  run->footer(smb::ConfigReference());

  std::string instance_path;
  std::string outcome_path;
  CLI::App* score = app.add_subcommand(
      "score", "Print the instability report of an outcome as JSON");
  score->add_option("--instance", instance_path,
                    "JSON with customer_utilities and provider_utilities")
      ->required();
  score->add_option("--outcome", outcome_path,
                    "JSON with mode, pairs and transfers")
      ->required();

  uint64_t seed = 1;
  int cases = 1000;
  CLI::App* verify = app.add_subcommand(
      "verify", "Cross-check the solvers against exhaustive oracles");
  verify->add_option("--seed", seed, "Random seed")->capture_default_str();
  verify->add_option("--cases", cases, "Number of random markets")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*run) return smb::RunCommand(config_path, threads, out_dir, std::cout,
                                   std::cerr);
  if (*score) {
    return smb::ScoreCommand(instance_path, outcome_path, std::cout, std::cerr);
  }
  return smb::VerifyCommand(seed, cases, std::cout, std::cerr);
}
