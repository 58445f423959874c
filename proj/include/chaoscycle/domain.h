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

// Shared value types of a chaos-engineering cycle. Nothing in here performs
// I/O; every type is a plain value that can be copied across threads.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "chaoscycle/duration.h"

namespace chaoscycle {

using Json = nlohmann::ordered_json;
using LabelMap = std::map<std::string, std::string>;

inline constexpr int kDefaultMaxSteadyStates = 2;
inline constexpr int kDefaultMaxRetries = 3;

// Lowercase alphanumerics and inner hyphens ("example-pod-running").
bool IsValidIdentifier(std::string_view name);

// ---------------------------------------------------------------------------
// Thresholds

enum class ThresholdMetric {
  kReadyRatio,          // share of samples where every desired replica is ready
  kRunningRatio,        // share of samples where >= 1 target pod is Running
  kRequestFailureRate,  // failed requests / total requests
  kReadyReplicasMin,    // minimum ready replica count over the window
};

enum class Comparator { kAtLeast, kAtMost, kEqual };

std::string_view MetricName(ThresholdMetric metric);
ThresholdMetric ParseMetric(std::string_view name);
std::string_view ComparatorSymbol(Comparator cmp);
Comparator ParseComparator(std::string_view symbol);

struct ThresholdSpec {
  ThresholdMetric metric = ThresholdMetric::kRunningRatio;
  Comparator comparator = Comparator::kAtLeast;
  double value = 0.0;
  std::string description;

  bool is_ratio() const { return metric != ThresholdMetric::kReadyReplicasMin; }
  // Exact comparison; equality passes under both >= and <=.
  bool Holds(double measured) const;
  // Empty when the value lies in the metric's domain.
  std::vector<std::string> Validate() const;

  friend bool operator==(const ThresholdSpec&, const ThresholdSpec&) = default;
};

// ---------------------------------------------------------------------------
// Validation-as-code probes

enum class ProbeTool { kClusterApi, kLoadTest };

std::string_view ProbeToolName(ProbeTool tool);
ProbeTool ParseProbeTool(std::string_view name);

// What a probe looks at. Cluster-api probes name one resource kind and either
// a resource name or a label selector; load-test probes carry a request URL.
struct ProbeTarget {
  std::string ns = "default";
  std::string kind;
  std::string name;
  LabelMap label_selector;
  std::string url;

  friend bool operator==(const ProbeTarget&, const ProbeTarget&) = default;
};

struct VaCSpec {
  ProbeTool tool = ProbeTool::kClusterApi;
  ProbeTarget target;
  Duration sample_interval = Duration::Seconds(1);
  std::string script_path;  // workspace-relative
  int version = 0;          // mod index of retargeted revisions
  int vus = 1;              // load-test virtual users

  std::vector<std::string> Validate() const;

  friend bool operator==(const VaCSpec&, const VaCSpec&) = default;
};

// Checks "<service>.<namespace>.svc.cluster.local[:port][/path]" URLs.
bool IsInternalServiceUrl(std::string_view url);

struct SamplePoint {
  std::int64_t t = 0;  // seconds from run start
  double value = 0.0;

  friend bool operator==(const SamplePoint&, const SamplePoint&) = default;
};

struct SampleTrace {
  std::string steady_state_name;
  std::vector<SamplePoint> samples;
  Duration duration;
};

// Aggregate a trace the way the metric is defined (see ThresholdMetric).
// Throws ContractViolation on an empty trace.
double AggregateTrace(ThresholdMetric metric, const SampleTrace& trace);
// Per-sample predicate used by ratio metrics (and for logging).
bool SampleSatisfies(ThresholdMetric metric, double sample_value);

struct VaCOutcome {
  std::string name;  // run identifier, e.g. fault-unittest-example-pod-running
  bool passed = false;
  std::string log;
  double measured = 0.0;
};

struct SteadyState {
  std::string name;
  std::string description;
  ThresholdSpec threshold;
  VaCSpec vac;
  // Observation recorded at definition time; must satisfy the threshold.
  std::optional<SampleTrace> baseline;
};

// ---------------------------------------------------------------------------
// Faults

enum class FaultKind {
  kPodChaos,
  kNetworkChaos,
  kDNSChaos,
  kHTTPChaos,
  kStressChaos,
  kIOChaos,
  kTimeChaos,
};

inline constexpr FaultKind kAllFaultKinds[] = {
    FaultKind::kPodChaos,    FaultKind::kNetworkChaos, FaultKind::kDNSChaos,
    FaultKind::kHTTPChaos,   FaultKind::kStressChaos,  FaultKind::kIOChaos,
    FaultKind::kTimeChaos,
};

std::string_view FaultKindName(FaultKind kind);
std::optional<FaultKind> ParseFaultKind(std::string_view name);

struct ExpressionRequirement {
  std::string key;
  std::string op;  // In, NotIn, Exists, DoesNotExist
  std::vector<std::string> values;

  friend bool operator==(const ExpressionRequirement&, const ExpressionRequirement&) = default;
};

// Mirrors the Chaos Mesh pod selector.
struct SelectorSpec {
  std::vector<std::string> namespaces;
  LabelMap label_selectors;
  std::vector<ExpressionRequirement> expression_selectors;
  LabelMap annotation_selectors;
  LabelMap field_selectors;
  std::vector<std::string> pod_phase_selectors;
  LabelMap node_selectors;
  std::vector<std::string> nodes;
  std::map<std::string, std::vector<std::string>> pods;

  bool empty() const;
  Json ToJson() const;
  static SelectorSpec FromJson(const Json& j);

  friend bool operator==(const SelectorSpec&, const SelectorSpec&) = default;
};

struct Fault {
  FaultKind kind = FaultKind::kPodChaos;
  int name_id = 0;  // disambiguates repeated kinds within a scenario
  Json params = Json::object();

  // The fault's pod selector (params.selector); empty when absent.
  SelectorSpec scope() const;
  void set_scope(const SelectorSpec& selector);
};

struct FailureScenario {
  std::string event;
  std::string description;
  // Outer list is injection order; inner lists are injected together.
  std::vector<std::vector<Fault>> sequence;

  std::vector<Fault> AllFaults() const;
};

struct Hypothesis {
  std::vector<SteadyState> steady_states;
  FailureScenario scenario;

  // Throws ValidationError unless: 1..max_steady_states states, unique valid
  // names, consistent thresholds/probes, baselines passing their thresholds,
  // a non-empty scenario and unique (kind, name_id) pairs.
  static Hypothesis Make(std::vector<SteadyState> steady_states,
                         FailureScenario scenario,
                         int max_steady_states = kDefaultMaxSteadyStates);

  const SteadyState* Find(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Experiment results

struct ExperimentResult {
  std::vector<std::string> scheduled_runs;
  std::vector<VaCOutcome> outcomes;

  const VaCOutcome* Find(std::string_view run) const;
  std::vector<std::string> FailedRuns() const;
  std::vector<std::string> PassedRuns() const;
};

// True iff every scheduled run has an outcome and all outcomes pass.
// Throws ContractViolation when a scheduled run has no outcome.
bool HypothesisSatisfied(const ExperimentResult& result);

// ---------------------------------------------------------------------------
// JSON (stable field names, see docs/schema.md)

void to_json(Json& j, const ThresholdSpec& v);
void from_json(const Json& j, ThresholdSpec& v);
void to_json(Json& j, const ProbeTarget& v);
void from_json(const Json& j, ProbeTarget& v);
void to_json(Json& j, const VaCSpec& v);
void from_json(const Json& j, VaCSpec& v);
void to_json(Json& j, const SampleTrace& v);
void from_json(const Json& j, SampleTrace& v);
void to_json(Json& j, const VaCOutcome& v);
void from_json(const Json& j, VaCOutcome& v);
void to_json(Json& j, const SteadyState& v);
void from_json(const Json& j, SteadyState& v);
void to_json(Json& j, const Fault& v);
void from_json(const Json& j, Fault& v);
void to_json(Json& j, const FailureScenario& v);
void from_json(const Json& j, FailureScenario& v);
void to_json(Json& j, const Hypothesis& v);
void from_json(const Json& j, Hypothesis& v);
void to_json(Json& j, const ExperimentResult& v);
void from_json(const Json& j, ExperimentResult& v);

}  // namespace chaoscycle
