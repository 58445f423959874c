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

// Execution backends: the in-process simulator and a kubectl dry-run adapter.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chaoscycle/domain.h"
#include "chaoscycle/experiment_compiler.h"
#include "chaoscycle/manifest_io.h"
#include "chaoscycle/workflow_simulator.h"

namespace chaoscycle {

struct ExecutionReport {
  ExperimentResult result;
  Json timeline = Json::object();
  std::vector<std::string> warnings;
  std::string summary;  // one line per leaf: start, end, name
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;

  virtual void Deploy(const SystemSnapshot& snapshot) = 0;
  // Samples a probe under normal operation.
  virtual SampleTrace Inspect(const std::string& state_name, const VaCSpec& vac, ThresholdMetric metric,
                              Duration duration) = 0;
  // Empty when the fault would apply cleanly against the deployed system.
  virtual std::vector<std::string> DryRunFault(const Fault& fault) = 0;
  // Throws BackendError when execution is impossible.
  virtual ExecutionReport Run(const WorkflowNode& tree, const std::string& manifest) = 0;
};

class SimulatorBackend : public Backend {
 public:
  explicit SimulatorBackend(SimulationOptions options = {}) : options_(options) {}

  std::string name() const override { return "simulator"; }
  void Deploy(const SystemSnapshot& snapshot) override;
  SampleTrace Inspect(const std::string& state_name, const VaCSpec& vac, ThresholdMetric metric,
                      Duration duration) override;
  std::vector<std::string> DryRunFault(const Fault& fault) override;
  ExecutionReport Run(const WorkflowNode& tree, const std::string& manifest) override;

  const std::optional<ClusterModel>& cluster() const { return cluster_; }

 private:
  const ClusterModel& Deployed() const;

  SimulationOptions options_;
  std::optional<ClusterModel> cluster_;
};

struct CommandResult {
  int exit_code = 0;
  std::string output;
};
using CommandRunner = std::function<CommandResult(const std::vector<std::string>& argv)>;
// Runs argv through the shell with every argument single-quoted.
CommandResult RunCommand(const std::vector<std::string>& argv);

// Validates manifests and fault resources with server-side dry runs. It never
// mutates the cluster; Inspect and Run are not available.
class LiveBackend : public Backend {
 public:
  explicit LiveBackend(std::string kubectl = "kubectl", CommandRunner runner = RunCommand);

  std::string name() const override { return "live"; }
  void Deploy(const SystemSnapshot& snapshot) override;
  SampleTrace Inspect(const std::string& state_name, const VaCSpec& vac, ThresholdMetric metric,
                      Duration duration) override;
  std::vector<std::string> DryRunFault(const Fault& fault) override;
  ExecutionReport Run(const WorkflowNode& tree, const std::string& manifest) override;

  // Chaos Mesh resource for a single fault, as applied by the dry run.
  static Json FaultResource(const Fault& fault, const std::string& ns = "chaos-mesh");

 private:
  CommandResult DryRun(const std::string& text);

  std::string kubectl_;
  CommandRunner runner_;
};

std::unique_ptr<Backend> MakeBackend(const std::string& name, std::uint64_t seed);

}  // namespace chaoscycle
