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

#include "chaoscycle/domain.h"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include "chaoscycle/error.h"

namespace chaoscycle {

namespace {

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += "; ";
    out += l;
  }
  return out;
}

bool IsDnsLabel(std::string_view s) { return IsValidIdentifier(s); }

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(JoinLines(violations)), violations_(std::move(violations)) {}

bool IsValidIdentifier(std::string_view name) {
  if (name.empty()) return false;
  auto alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!alnum(name.front()) || !alnum(name.back())) return false;
  return std::all_of(name.begin(), name.end(),
                     [&](char c) { return alnum(c) || c == '-'; });
}

// ---------------------------------------------------------------------------

std::string_view MetricName(ThresholdMetric metric) {
  switch (metric) {
    case ThresholdMetric::kReadyRatio: return "ready-ratio";
    case ThresholdMetric::kRunningRatio: return "running-ratio";
    case ThresholdMetric::kRequestFailureRate: return "request-failure-rate";
    case ThresholdMetric::kReadyReplicasMin: return "ready-replicas-min";
  }
  return "unknown";
}

ThresholdMetric ParseMetric(std::string_view name) {
  for (auto m : {ThresholdMetric::kReadyRatio, ThresholdMetric::kRunningRatio,
                 ThresholdMetric::kRequestFailureRate,
                 ThresholdMetric::kReadyReplicasMin}) {
    if (MetricName(m) == name) return m;
  }
  throw ParseError("unknown threshold metric '" + std::string(name) +
                   "' (expected ready-ratio, running-ratio, "
                   "request-failure-rate or ready-replicas-min)");
}

std::string_view ComparatorSymbol(Comparator cmp) {
  switch (cmp) {
    case Comparator::kAtLeast: return ">=";
    case Comparator::kAtMost: return "<=";
    case Comparator::kEqual: return "==";
  }
  return "?";
}

Comparator ParseComparator(std::string_view symbol) {
  if (symbol == ">=" || symbol == "≥") return Comparator::kAtLeast;
  if (symbol == "<=" || symbol == "≤") return Comparator::kAtMost;
  if (symbol == "==" || symbol == "=") return Comparator::kEqual;
  throw ParseError("unknown comparator '" + std::string(symbol) + "'");
}

bool ThresholdSpec::Holds(double measured) const {
  switch (comparator) {
    case Comparator::kAtLeast: return measured >= value;
    case Comparator::kAtMost: return measured <= value;
    case Comparator::kEqual: return measured == value;
  }
  return false;
}

std::vector<std::string> ThresholdSpec::Validate() const {
  std::vector<std::string> out;
  if (!std::isfinite(value)) {
    out.push_back("threshold value must be finite");
  } else if (is_ratio()) {
    if (value < 0.0 || value > 1.0) {
      out.push_back("threshold " + std::string(MetricName(metric)) +
                    " expects a ratio in [0,1], found " + std::to_string(value));
    }
  } else if (value < 0.0 || std::floor(value) != value) {
    out.push_back("threshold " + std::string(MetricName(metric)) +
                  " expects a non-negative integer, found " + std::to_string(value));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view ProbeToolName(ProbeTool tool) {
  return tool == ProbeTool::kClusterApi ? "cluster-api" : "load-test";
}

ProbeTool ParseProbeTool(std::string_view name) {
  if (name == "cluster-api" || name == "k8s") return ProbeTool::kClusterApi;
  if (name == "load-test" || name == "k6") return ProbeTool::kLoadTest;
  throw ParseError("unknown probe tool '" + std::string(name) + "'");
}

bool IsInternalServiceUrl(std::string_view url) {
  static const std::regex kPattern(
      R"(^(https?://)?([a-z0-9]([a-z0-9-]*[a-z0-9])?)\.([a-z0-9]([a-z0-9-]*[a-z0-9])?)\.svc\.cluster\.local(:[0-9]{1,5})?([/?].*)?$)");
  return std::regex_match(url.begin(), url.end(), kPattern);
}

std::vector<std::string> VaCSpec::Validate() const {
  std::vector<std::string> out;
  if (sample_interval != Duration::Seconds(1)) {
    out.push_back("sample_interval must be 1s, found " + FormatDuration(sample_interval));
  }
  if (version < 0) out.push_back("vac version must be non-negative");
  if (tool == ProbeTool::kClusterApi) {
    if (target.kind.empty() || target.kind.find_first_of(" ,/") != std::string::npos) {
      out.push_back("cluster-api probe must name exactly one resource kind, found '" +
                    target.kind + "'");
    }
    if (target.name.empty() == target.label_selector.empty()) {
      out.push_back("cluster-api probe needs exactly one of resource name or label selector");
    }
    if (!IsDnsLabel(target.ns)) out.push_back("invalid namespace '" + target.ns + "'");
  } else {
    if (!IsInternalServiceUrl(target.url)) {
      out.push_back("load-test target must be an internal service URL "
                    "(<service>.<namespace>.svc.cluster.local[:port]), found '" +
                    target.url + "'");
    }
    if (vus < 1) out.push_back("load-test vus must be >= 1");
  }
  return out;
}

// ---------------------------------------------------------------------------

bool SampleSatisfies(ThresholdMetric metric, double v) {
  switch (metric) {
    case ThresholdMetric::kReadyRatio: return v >= 1.0;
    case ThresholdMetric::kRunningRatio: return v >= 1.0;
    case ThresholdMetric::kRequestFailureRate: return v <= 0.0;
    case ThresholdMetric::kReadyReplicasMin: return v >= 1.0;
  }
  return false;
}

double AggregateTrace(ThresholdMetric metric, const SampleTrace& trace) {
  if (trace.samples.empty()) {
    throw ContractViolation("empty sample trace for '" + trace.steady_state_name + "'");
  }
  const auto n = static_cast<double>(trace.samples.size());
  switch (metric) {
    case ThresholdMetric::kReadyRatio:
    case ThresholdMetric::kRunningRatio: {
      const auto ok = std::count_if(trace.samples.begin(), trace.samples.end(),
                                    [&](const SamplePoint& p) { return SampleSatisfies(metric, p.value); });
      return static_cast<double>(ok) / n;
    }
    case ThresholdMetric::kRequestFailureRate: {
      double failed = 0.0;
      for (const auto& p : trace.samples) failed += p.value;
      return failed / n;
    }
    case ThresholdMetric::kReadyReplicasMin: {
      double lo = trace.samples.front().value;
      for (const auto& p : trace.samples) lo = std::min(lo, p.value);
      return lo;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

std::string_view FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kPodChaos: return "PodChaos";
    case FaultKind::kNetworkChaos: return "NetworkChaos";
    case FaultKind::kDNSChaos: return "DNSChaos";
    case FaultKind::kHTTPChaos: return "HTTPChaos";
    case FaultKind::kStressChaos: return "StressChaos";
    case FaultKind::kIOChaos: return "IOChaos";
    case FaultKind::kTimeChaos: return "TimeChaos";
  }
  return "Unknown";
}

std::optional<FaultKind> ParseFaultKind(std::string_view name) {
  for (auto k : kAllFaultKinds) {
    if (FaultKindName(k) == name) return k;
  }
  return std::nullopt;
}

bool SelectorSpec::empty() const {
  return namespaces.empty() && label_selectors.empty() && expression_selectors.empty() &&
         annotation_selectors.empty() && field_selectors.empty() &&
         pod_phase_selectors.empty() && node_selectors.empty() && nodes.empty() &&
         pods.empty();
}

Json SelectorSpec::ToJson() const {
  Json j = Json::object();
  if (!namespaces.empty()) j["namespaces"] = namespaces;
  if (!label_selectors.empty()) j["labelSelectors"] = label_selectors;
  if (!expression_selectors.empty()) {
    Json arr = Json::array();
    for (const auto& e : expression_selectors) {
      arr.push_back({{"key", e.key}, {"operator", e.op}, {"values", e.values}});
    }
    j["expressionSelectors"] = arr;
  }
  if (!annotation_selectors.empty()) j["annotationSelectors"] = annotation_selectors;
  if (!field_selectors.empty()) j["fieldSelectors"] = field_selectors;
  if (!pod_phase_selectors.empty()) j["podPhaseSelectors"] = pod_phase_selectors;
  if (!node_selectors.empty()) j["nodeSelectors"] = node_selectors;
  if (!nodes.empty()) j["nodes"] = nodes;
  if (!pods.empty()) j["pods"] = pods;
  return j;
}

namespace {

LabelMap StringMap(const Json& j, const char* field) {
  LabelMap out;
  if (!j.is_object()) throw ParseError(std::string("selector field ") + field + " must be an object");
  for (const auto& [k, v] : j.items()) {
    out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return out;
}

std::vector<std::string> StringList(const Json& j, const char* field) {
  if (!j.is_array()) throw ParseError(std::string("selector field ") + field + " must be a list");
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  return out;
}

}  // namespace

SelectorSpec SelectorSpec::FromJson(const Json& j) {
  SelectorSpec s;
  if (j.is_null()) return s;
  if (!j.is_object()) throw ParseError("selector must be an object");
  if (j.contains("namespaces")) s.namespaces = StringList(j["namespaces"], "namespaces");
  if (j.contains("labelSelectors")) s.label_selectors = StringMap(j["labelSelectors"], "labelSelectors");
  if (j.contains("expressionSelectors")) {
    const auto& arr = j["expressionSelectors"];
    if (!arr.is_array()) throw ParseError("selector field expressionSelectors must be a list");
    for (const auto& e : arr) {
      ExpressionRequirement r;
      r.key = e.value("key", "");
      r.op = e.value("operator", "");
      if (e.contains("values")) r.values = StringList(e["values"], "values");
      s.expression_selectors.push_back(std::move(r));
    }
  }
  if (j.contains("annotationSelectors")) s.annotation_selectors = StringMap(j["annotationSelectors"], "annotationSelectors");
  if (j.contains("fieldSelectors")) s.field_selectors = StringMap(j["fieldSelectors"], "fieldSelectors");
  if (j.contains("podPhaseSelectors")) s.pod_phase_selectors = StringList(j["podPhaseSelectors"], "podPhaseSelectors");
  if (j.contains("nodeSelectors")) s.node_selectors = StringMap(j["nodeSelectors"], "nodeSelectors");
  if (j.contains("nodes")) s.nodes = StringList(j["nodes"], "nodes");
  if (j.contains("pods")) {
    if (!j["pods"].is_object()) throw ParseError("selector field pods must be an object");
    for (const auto& [ns, names] : j["pods"].items()) s.pods[ns] = StringList(names, "pods");
  }
  return s;
}

SelectorSpec Fault::scope() const {
  if (!params.is_object() || !params.contains("selector")) return {};
  return SelectorSpec::FromJson(params["selector"]);
}

void Fault::set_scope(const SelectorSpec& selector) {
  if (!params.is_object()) params = Json::object();
  params["selector"] = selector.ToJson();
}

std::vector<Fault> FailureScenario::AllFaults() const {
  std::vector<Fault> out;
  for (const auto& group : sequence) out.insert(out.end(), group.begin(), group.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool MetricMatchesTool(ThresholdMetric metric, ProbeTool tool) {
  return (metric == ThresholdMetric::kRequestFailureRate) == (tool == ProbeTool::kLoadTest);
}

}  // namespace

Hypothesis Hypothesis::Make(std::vector<SteadyState> steady_states,
                            FailureScenario scenario, int max_steady_states) {
  std::vector<std::string> v;
  if (steady_states.empty()) v.push_back("hypothesis needs at least one steady state");
  if (static_cast<int>(steady_states.size()) > max_steady_states) {
    v.push_back("hypothesis has " + std::to_string(steady_states.size()) +
                " steady states, cap is " + std::to_string(max_steady_states));
  }
  std::set<std::string> names;
  for (const auto& ss : steady_states) {
    if (!IsValidIdentifier(ss.name)) v.push_back("invalid steady-state name '" + ss.name + "'");
    if (!names.insert(ss.name).second) v.push_back("duplicate steady-state name '" + ss.name + "'");
    for (auto& e : ss.threshold.Validate()) v.push_back(ss.name + ": " + e);
    for (auto& e : ss.vac.Validate()) v.push_back(ss.name + ": " + e);
    if (!MetricMatchesTool(ss.threshold.metric, ss.vac.tool)) {
      v.push_back(ss.name + ": metric " + std::string(MetricName(ss.threshold.metric)) +
                  " cannot be measured with " + std::string(ProbeToolName(ss.vac.tool)));
    }
    if (ss.baseline) {
      if (ss.baseline->samples.empty()) {
        v.push_back(ss.name + ": baseline trace is empty");
      } else {
        const double measured = AggregateTrace(ss.threshold.metric, *ss.baseline);
        if (!ss.threshold.Holds(measured)) {
          v.push_back(ss.name + ": baseline " + std::to_string(measured) +
                      " does not satisfy threshold " +
                      std::string(ComparatorSymbol(ss.threshold.comparator)) + " " +
                      std::to_string(ss.threshold.value));
        }
      }
    }
  }
  if (scenario.sequence.empty()) v.push_back("failure scenario has no faults");
  std::set<std::pair<FaultKind, int>> ids;
  for (const auto& group : scenario.sequence) {
    if (group.empty()) v.push_back("failure scenario contains an empty fault group");
    for (const auto& f : group) {
      if (!ids.insert({f.kind, f.name_id}).second) {
        v.push_back("duplicate fault " + std::string(FaultKindName(f.kind)) + "#" +
                    std::to_string(f.name_id));
      }
    }
  }
  if (!v.empty()) throw ValidationError(std::move(v));
  return Hypothesis{std::move(steady_states), std::move(scenario)};
}

const SteadyState* Hypothesis::Find(std::string_view name) const {
  for (const auto& ss : steady_states) {
    if (ss.name == name) return &ss;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

const VaCOutcome* ExperimentResult::Find(std::string_view run) const {
  for (const auto& o : outcomes) {
    if (o.name == run) return &o;
  }
  return nullptr;
}

std::vector<std::string> ExperimentResult::FailedRuns() const {
  std::vector<std::string> out;
  for (const auto& o : outcomes) {
    if (!o.passed) out.push_back(o.name);
  }
  return out;
}

std::vector<std::string> ExperimentResult::PassedRuns() const {
  std::vector<std::string> out;
  for (const auto& o : outcomes) {
    if (o.passed) out.push_back(o.name);
  }
  return out;
}

bool HypothesisSatisfied(const ExperimentResult& result) {
  bool all_pass = true;
  for (const auto& run : result.scheduled_runs) {
    const VaCOutcome* o = result.Find(run);
    if (o == nullptr) {
      throw ContractViolation("experiment result has no outcome for scheduled run '" + run + "'");
    }
    all_pass = all_pass && o->passed;
  }
  for (const auto& o : result.outcomes) all_pass = all_pass && o.passed;
  return all_pass;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(Json& j, const ThresholdSpec& v) {
  j = Json{{"metric", MetricName(v.metric)},
           {"comparator", ComparatorSymbol(v.comparator)},
           {"value", v.value},
           {"description", v.description}};
}

void from_json(const Json& j, ThresholdSpec& v) {
  v.metric = ParseMetric(j.at("metric").get<std::string>());
  v.comparator = ParseComparator(j.at("comparator").get<std::string>());
  v.value = j.at("value").get<double>();
  v.description = j.value("description", "");
}

void to_json(Json& j, const ProbeTarget& v) {
  j = Json{{"namespace", v.ns}, {"kind", v.kind}, {"name", v.name},
           {"label_selector", v.label_selector}, {"url", v.url}};
}

void from_json(const Json& j, ProbeTarget& v) {
  v.ns = j.value("namespace", "default");
  v.kind = j.value("kind", "");
  v.name = j.value("name", "");
  v.label_selector = j.value("label_selector", LabelMap{});
  v.url = j.value("url", "");
}

void to_json(Json& j, const VaCSpec& v) {
  j = Json{{"tool", ProbeToolName(v.tool)},
           {"target", v.target},
           {"sample_interval", FormatDuration(v.sample_interval)},
           {"script_path", v.script_path},
           {"version", v.version},
           {"vus", v.vus}};
}

void from_json(const Json& j, VaCSpec& v) {
  v.tool = ParseProbeTool(j.at("tool").get<std::string>());
  v.target = j.at("target").get<ProbeTarget>();
  v.sample_interval = ParseDuration(j.value("sample_interval", "1s"));
  v.script_path = j.value("script_path", "");
  v.version = j.value("version", 0);
  v.vus = j.value("vus", 1);
}

void to_json(Json& j, const SampleTrace& v) {
  Json samples = Json::array();
  for (const auto& p : v.samples) samples.push_back(Json::array({p.t, p.value}));
  j = Json{{"steady_state_name", v.steady_state_name},
           {"duration", FormatDuration(v.duration)},
           {"samples", samples}};
}

void from_json(const Json& j, SampleTrace& v) {
  v.steady_state_name = j.value("steady_state_name", "");
  v.duration = ParseDuration(j.value("duration", "0s"));
  v.samples.clear();
  for (const auto& p : j.at("samples")) {
    v.samples.push_back({p.at(0).get<std::int64_t>(), p.at(1).get<double>()});
  }
}

void to_json(Json& j, const VaCOutcome& v) {
  j = Json{{"name", v.name}, {"passed", v.passed}, {"measured", v.measured}, {"log", v.log}};
}

void from_json(const Json& j, VaCOutcome& v) {
  v.name = j.at("name").get<std::string>();
  v.passed = j.at("passed").get<bool>();
  v.measured = j.value("measured", 0.0);
  v.log = j.value("log", "");
}

void to_json(Json& j, const SteadyState& v) {
  j = Json{{"name", v.name},
           {"description", v.description},
           {"threshold", v.threshold},
           {"vac", v.vac}};
  if (v.baseline) j["baseline"] = *v.baseline;
}

void from_json(const Json& j, SteadyState& v) {
  v.name = j.at("name").get<std::string>();
  v.description = j.value("description", "");
  v.threshold = j.at("threshold").get<ThresholdSpec>();
  v.vac = j.at("vac").get<VaCSpec>();
  if (j.contains("baseline") && !j["baseline"].is_null()) {
    v.baseline = j["baseline"].get<SampleTrace>();
  } else {
    v.baseline.reset();
  }
}

void to_json(Json& j, const Fault& v) {
  j = Json{{"kind", FaultKindName(v.kind)}, {"name_id", v.name_id}, {"params", v.params}};
}

void from_json(const Json& j, Fault& v) {
  const auto name = j.at("kind").get<std::string>();
  auto kind = ParseFaultKind(name);
  if (!kind) throw ParseError("unsupported fault kind '" + name + "'");
  v.kind = *kind;
  v.name_id = j.value("name_id", 0);
  v.params = j.value("params", Json::object());
}

void to_json(Json& j, const FailureScenario& v) {
  j = Json{{"event", v.event}, {"description", v.description}, {"sequence", v.sequence}};
}

void from_json(const Json& j, FailureScenario& v) {
  v.event = j.value("event", "");
  v.description = j.value("description", "");
  v.sequence = j.at("sequence").get<std::vector<std::vector<Fault>>>();
}

void to_json(Json& j, const Hypothesis& v) {
  j = Json{{"steady_states", v.steady_states}, {"scenario", v.scenario}};
}

void from_json(const Json& j, Hypothesis& v) {
  v.steady_states = j.at("steady_states").get<std::vector<SteadyState>>();
  v.scenario = j.at("scenario").get<FailureScenario>();
}

void to_json(Json& j, const ExperimentResult& v) {
  j = Json{{"scheduled_runs", v.scheduled_runs}, {"outcomes", v.outcomes}};
}

void from_json(const Json& j, ExperimentResult& v) {
  v.scheduled_runs = j.at("scheduled_runs").get<std::vector<std::string>>();
  v.outcomes = j.at("outcomes").get<std::vector<VaCOutcome>>();
}

}  // namespace chaoscycle
