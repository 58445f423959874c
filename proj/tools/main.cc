// Copyright 2026 The Chaoscycle Authors
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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "chaoscycle/cycle_orchestrator.h"
#include "chaoscycle/error.h"

namespace {

// A readable file path is replaced by its contents.
std::string ReadInstructions(const std::string& arg) {
  std::error_code ec;
  if (arg.empty() || !std::filesystem::is_regular_file(arg, ec)) return arg;
  std::ifstream in(arg);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runs an automated chaos engineering cycle over a Kubernetes project."};
  app.require_subcommand(1);

  chaoscycle::CycleConfig config;
  std::string project;
  std::string instructions;
  std::string planner = "stub";
  bool quiet = false;
  CLI::App* run = app.add_subcommand("run", "Run one cycle on a project directory or zip archive");
  run->add_option("project", project, "Project directory or .zip with a skaffold.yaml")->required();
  run->add_option("--instructions", instructions, "Chaos engineering instructions, inline or a file path");
  run->add_option("--backend", config.backend, "Execution backend")
      ->check(CLI::IsMember({"simulator", "live"}))
      ->capture_default_str();
  run->add_option("--max-steady-states", config.max_steady_states)->check(CLI::Range(1, 100))->capture_default_str();
  run->add_option("--max-retries", config.max_retries)->check(CLI::Range(1, 100))->capture_default_str();
  run->add_option("--seed", config.seed)->capture_default_str();
  run->add_option("--temperature", config.temperature)->check(CLI::NonNegativeNumber)->capture_default_str();
  run->add_option("--planner", planner)->check(CLI::IsMember({"stub", "llm"}))->capture_default_str();
  run->add_option("--out", config.out_dir, "Directory that receives sandbox/cycle_<stamp>/")->capture_default_str();
  run->add_option("--stamp", config.stamp, "Cycle folder suffix (UTC time by default)");
  run->add_flag("-q,--quiet", quiet, "Print only the status line");

  CLI11_PARSE(app, argc, argv);

  try {
    config.instructions = ReadInstructions(instructions);
    const chaoscycle::CycleOutput out = chaoscycle::RunCycle(std::filesystem::path(project), config, planner);
    if (!quiet) std::cout << out.summary << "\n";
    const auto total = out.ledger.Total();
    std::cout << "status: " << chaoscycle::CycleStatusName(out.status) << "\n"
              << "experiments: " << out.history.experiments_run
              << ", improvements: " << out.history.improvement_history.size() << "\n"
              << "tokens: " << total.input_tokens << " in, " << total.output_tokens << " out, "
              << chaoscycle::FormatUsd(out.ledger.TotalCost()) << "\n"
              << "workspace: " << out.workspace.string() << "\n";
    if (!out.diagnostics.empty()) std::cerr << out.diagnostics << "\n";
    const bool ok = out.status == chaoscycle::CycleStatus::kSatisfied ||
                    out.status == chaoscycle::CycleStatus::kSatisfiedWithoutChange;
    return ok ? 0 : 1;
  } catch (const chaoscycle::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
