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

#include "chaoscycle/backend.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <sys/wait.h>

#include "chaoscycle/error.h"
#include "chaoscycle/fault_catalog.h"
#include "chaoscycle/yaml_json.h"

namespace chaoscycle {

namespace fs = std::filesystem;

namespace {

std::string Summarize(const Timeline& t) {
  std::string out;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> spans;
  std::vector<std::string> order;
  for (const auto& e : t.events) {
    if (!spans.count(e.node)) order.push_back(e.node);
    auto& s = spans[e.node];
    (e.kind == TimelineEvent::Kind::kStart ? s.first : s.second) = e.t;
  }
  for (const auto& n : order) {
    out += "[" + std::to_string(spans[n].first) + "s, " + std::to_string(spans[n].second) + "s) " + n + "\n";
  }
  return out;
}

}  // namespace

void SimulatorBackend::Deploy(const SystemSnapshot& snapshot) { cluster_ = BuildCluster(snapshot); }

const ClusterModel& SimulatorBackend::Deployed() const {
  if (!cluster_) throw BackendError("nothing deployed yet");
  return *cluster_;
}

SampleTrace SimulatorBackend::Inspect(const std::string& state_name, const VaCSpec& vac, ThresholdMetric metric,
                                      Duration duration) {
  if (duration.is_zero()) throw ContractViolation("inspection needs a positive duration");
  WorkflowNode task;
  task.name = "inspect-" + state_name;
  task.type = NodeType::kTask;
  task.duration = duration;
  task.deadline = duration;
  task.item = state_name;
  task.vac = vac;
  task.threshold = ThresholdSpec{metric, Comparator::kAtLeast, 0.0, ""};
  const SimulationResult r = Simulate(task, Deployed(), options_);
  SampleTrace trace = r.timeline.traces.at(task.name);
  trace.steady_state_name = state_name;
  return trace;
}

std::vector<std::string> SimulatorBackend::DryRunFault(const Fault& fault) {
  FaultCheck check = ValidateFault(fault);
  std::vector<std::string> out = check.violations;
  if (!out.empty()) return out;
  const std::string label = std::string(FaultKindName(fault.kind)) + "#" + std::to_string(fault.name_id);
  if (ResolveSelector(Deployed(), fault.scope()).empty()) {
    out.push_back(label + ": selector " + fault.scope().ToJson().dump() + " matches no running pod");
  }
  if (fault.params.contains("target") && fault.params["target"].contains("selector")) {
    const SelectorSpec t = SelectorSpec::FromJson(fault.params["target"]["selector"]);
    if (ResolveSelector(Deployed(), t).empty()) {
      out.push_back(label + ": target selector " + t.ToJson().dump() + " matches no running pod");
    }
  }
  return out;
}

ExecutionReport SimulatorBackend::Run(const WorkflowNode& tree, const std::string&) {
  SimulationResult r = Simulate(tree, Deployed(), options_);
  ExecutionReport out;
  out.result = r.result();
  out.timeline = r.timeline.ToJson();
  out.warnings = r.warnings;
  out.summary = Summarize(r.timeline);
  return out;
}

CommandResult RunCommand(const std::vector<std::string>& argv) {
  std::string cmd;
  for (const auto& a : argv) {
    std::string q = "'";
    for (char c : a) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    cmd += q + "' ";
  }
  cmd += "2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {127, "cannot start " + (argv.empty() ? std::string() : argv[0])};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : 1, out};
}

LiveBackend::LiveBackend(std::string kubectl, CommandRunner runner)
    : kubectl_(std::move(kubectl)), runner_(std::move(runner)) {}

CommandResult LiveBackend::DryRun(const std::string& text) {
  std::random_device rd;
  const fs::path tmp = fs::temp_directory_path() / ("chaoscycle-dryrun-" + std::to_string(rd()) + ".yaml");
  {
    std::ofstream f(tmp);
    f << text;
  }
  CommandResult r = runner_({kubectl_, "apply", "--dry-run=server", "-f", tmp.string()});
  std::error_code ec;
  fs::remove(tmp, ec);
  return r;
}

void LiveBackend::Deploy(const SystemSnapshot& snapshot) {
  std::vector<std::string> failures;
  for (const auto& p : snapshot.manifest_paths) {
    const CommandResult r = DryRun(snapshot.files.at(p));
    if (r.exit_code != 0) failures.push_back(p + ": " + r.output);
  }
  if (!failures.empty()) {
    std::string msg = "server-side dry run rejected the manifests:";
    for (const auto& f : failures) msg += "\n" + f;
    throw BackendError(msg);
  }
}

SampleTrace LiveBackend::Inspect(const std::string&, const VaCSpec&, ThresholdMetric, Duration) {
  throw BackendError("the live backend only performs dry runs; use the simulator backend to inspect probes");
}

Json LiveBackend::FaultResource(const Fault& fault, const std::string& ns) {
  std::string kind(FaultKindName(fault.kind));
  std::string lower;
  for (char c : kind) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return Json{{"apiVersion", "chaos-mesh.org/v1alpha1"},
              {"kind", kind},
              {"metadata", {{"name", "dryrun-" + lower + "-" + std::to_string(fault.name_id)}, {"namespace", ns}}},
              {"spec", RenderFaultBody(fault).begin().value()}};
}

std::vector<std::string> LiveBackend::DryRunFault(const Fault& fault) {
  std::vector<std::string> out = ValidateFault(fault).violations;
  if (!out.empty()) return out;
  const CommandResult r = DryRun(DumpYaml(FaultResource(fault)));
  if (r.exit_code != 0) out.push_back("server-side dry run failed: " + r.output);
  return out;
}

ExecutionReport LiveBackend::Run(const WorkflowNode&, const std::string&) {
  throw BackendError("the live backend does not execute workflows; apply the emitted manifest with kubectl");
}

std::unique_ptr<Backend> MakeBackend(const std::string& name, std::uint64_t seed) {
  if (name == "simulator") {
    SimulationOptions o;
    o.seed = seed;
    return std::make_unique<SimulatorBackend>(o);
  }
  if (name == "live") return std::make_unique<LiveBackend>();
  throw ConfigError("unknown backend '" + name + "' (expected simulator or live)");
}

}  // namespace chaoscycle
