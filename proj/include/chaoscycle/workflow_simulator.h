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

// Tick-based execution of compiled workflows against a modelled cluster.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaoscycle/domain.h"
#include "chaoscycle/experiment_compiler.h"
#include "chaoscycle/manifest_io.h"

namespace chaoscycle {

enum class PodPhase { kRunning, kAbsent };

struct ResourceState {
  std::string kind;  // Pod, Deployment, StatefulSet, ReplicaSet, Service, or other (inert)
  std::string ns;
  std::string name;
  LabelMap labels;
  bool inert = false;

  // Pods.
  PodPhase phase = PodPhase::kRunning;
  std::int64_t ready_at = 0;  // ready once Running and clock >= ready_at
  std::string owner;          // controller name, empty for bare pods
  bool stressed = false;
  bool delayed = false;      // latency injected
  bool unreachable = false;  // requests to this pod fail

  // Workload controllers.
  int desired_replicas = 0;
  LabelMap pod_labels;
  std::int64_t readiness_delay = 0;  // readinessProbe.initialDelaySeconds
  std::vector<std::int64_t> pending_respawns;
  std::vector<std::string> pods;

  // Services.
  LabelMap selector;
  std::vector<int> ports;
};

struct ClusterModel {
  // Keyed "<namespace>/<Kind>/<name>".
  std::map<std::string, ResourceState> resources;
  std::int64_t clock = 0;
  std::vector<std::string> warnings;

  static std::string Key(std::string_view ns, std::string_view kind, std::string_view name);
  const ResourceState* Get(std::string_view ns, std::string_view kind, std::string_view name) const;
  ResourceState* Get(std::string_view ns, std::string_view kind, std::string_view name);

  bool PodReady(const ResourceState& pod) const;
  // Ready replicas of a controller, never above desired.
  int ReadyReplicas(const ResourceState& controller) const;
  std::vector<const ResourceState*> Pods() const;
};

ClusterModel BuildCluster(const SystemSnapshot& snapshot);

struct SimulationOptions {
  std::uint64_t seed = 0;
  Duration restart_delay = Duration::Seconds(3);
  // Honour readinessProbe.initialDelaySeconds on respawned pods.
  bool readiness_delays = true;
  // Optional degradation hook: stressed pods count as not ready.
  bool stress_degrades_readiness = false;
};

struct TimelineEvent {
  enum class Kind { kStart, kEnd };
  std::int64_t t = 0;
  std::string node;
  Kind kind = Kind::kStart;
};

struct Timeline {
  std::vector<TimelineEvent> events;  // ordered by time
  std::map<std::string, SampleTrace> traces;
  std::int64_t end = 0;

  // [start, end) of a task or failure leaf.
  std::optional<std::pair<std::int64_t, std::int64_t>> Interval(std::string_view node) const;
  Json ToJson() const;
};

struct SimulationResult {
  Timeline timeline;
  std::vector<VaCOutcome> outcomes;  // in task start order
  std::vector<std::string> scheduled_runs;
  std::vector<std::string> warnings;
  ClusterModel final_state;

  ExperimentResult result() const { return {scheduled_runs, outcomes}; }
};

// Throws ContractViolation when a task lacks its probe or threshold or a
// failure lacks its fault.
// "<namespace>/<pod>" of every running pod the selector matches.
std::vector<std::string> ResolveSelector(const ClusterModel& cluster, const SelectorSpec& selector);

SimulationResult Simulate(const WorkflowNode& tree, ClusterModel cluster,
                          const SimulationOptions& options = {});

// Empty when every task and failure leaf compiled from plan starts at its
// stage offset plus grace period and lasts exactly its duration.
std::vector<std::string> TimelineCheck(const Timeline& timeline, const ExperimentPlan& plan);

}  // namespace chaoscycle
