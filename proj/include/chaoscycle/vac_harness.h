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

// Validation-as-code: runner commands, probe scripts, threshold checks.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaoscycle/domain.h"

namespace chaoscycle {

inline constexpr std::string_view kVolumeMount = "/chaos-eater";
inline constexpr std::string_view kClusterApiImage = "chaos-eater/k8sapi:1.0";
inline constexpr std::string_view kLoadTestImage = "grafana/k6:latest";

struct RunnerSpec {
  std::string image;
  std::optional<std::string> image_pull_policy;
  // Container command/args as they appear in a workflow Task node.
  std::vector<std::string> command;
  std::vector<std::string> args;
  // The logical argument vector the container ends up executing.
  std::vector<std::string> argv;
};

// Throws ContractViolation for a zero duration or an empty script path.
RunnerSpec RunnerCommand(const VaCSpec& vac, Duration duration,
                         std::string_view mount = kVolumeMount);

// Recovers (tool, script path, duration) from a Task container. Returns
// nullopt when the container does not look like a rendered runner.
struct ParsedRunner {
  ProbeTool tool;
  std::string script_path;  // without the mount prefix
  Duration duration;
};
std::optional<ParsedRunner> ParseRunner(const Json& container,
                                        std::string_view mount = kVolumeMount);

// Python (cluster-api) or k6 JavaScript (load-test) source. Deterministic.
// Throws ContractViolation when the metric cannot be measured by the tool.
std::string RenderProbeScript(const VaCSpec& vac, const ThresholdSpec& threshold);

// "unittest_<name>_mod<version>.py|.js" under the given directory.
std::string ProbeScriptPath(std::string_view dir, std::string_view steady_state,
                            const VaCSpec& vac);

// Throws ContractViolation on an empty or non-increasing trace.
VaCOutcome EvaluateThreshold(const ThresholdSpec& threshold, const SampleTrace& trace,
                             std::string run_name = "");

}  // namespace chaoscycle
