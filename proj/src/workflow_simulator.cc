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

#include "chaoscycle/workflow_simulator.h"

#include <algorithm>
#include <random>
#include <regex>
#include <set>

#include "chaoscycle/error.h"
#include "chaoscycle/vac_harness.h"

namespace chaoscycle {

namespace {

bool IsController(std::string_view kind) {
  return kind == "Deployment" || kind == "StatefulSet" || kind == "ReplicaSet";
}

bool LabelsMatch(const LabelMap& want, const LabelMap& have) {
  for (const auto& [k, v] : want) {
    auto it = have.find(k);
    if (it == have.end() || it->second != v) return false;
  }
  return true;
}

std::int64_t ReadinessDelay(const Json& pod_spec) {
  std::int64_t d = 0;
  if (!pod_spec.is_object() || !pod_spec.contains("containers") || !pod_spec["containers"].is_array()) return 0;
  for (const auto& c : pod_spec["containers"]) {
    if (c.contains("readinessProbe") && c["readinessProbe"].is_object()) {
      const auto& p = c["readinessProbe"];
      if (p.contains("initialDelaySeconds") && p["initialDelaySeconds"].is_number_integer()) {
        d = std::max<std::int64_t>(d, p["initialDelaySeconds"].get<std::int64_t>());
      }
    }
  }
  return d;
}

}  // namespace

std::string ClusterModel::Key(std::string_view ns, std::string_view kind, std::string_view name) {
  return std::string(ns) + "/" + std::string(kind) + "/" + std::string(name);
}

const ResourceState* ClusterModel::Get(std::string_view ns, std::string_view kind, std::string_view name) const {
  auto it = resources.find(Key(ns, kind, name));
  return it == resources.end() ? nullptr : &it->second;
}

ResourceState* ClusterModel::Get(std::string_view ns, std::string_view kind, std::string_view name) {
  auto it = resources.find(Key(ns, kind, name));
  return it == resources.end() ? nullptr : &it->second;
}

bool ClusterModel::PodReady(const ResourceState& pod) const {
  return pod.phase == PodPhase::kRunning && clock >= pod.ready_at;
}

int ClusterModel::ReadyReplicas(const ResourceState& controller) const {
  int ready = 0;
  for (const auto& p : controller.pods) {
    const auto* pod = Get(controller.ns, "Pod", p);
    if (pod && PodReady(*pod)) ++ready;
  }
  return std::min(ready, controller.desired_replicas);
}

std::vector<const ResourceState*> ClusterModel::Pods() const {
  std::vector<const ResourceState*> out;
  for (const auto& [k, r] : resources) {
    if (r.kind == "Pod") out.push_back(&r);
  }
  return out;
}

ClusterModel BuildCluster(const SystemSnapshot& snapshot) {
  ClusterModel m;
  for (const auto& doc : snapshot.manifests) {
    ResourceState r;
    r.kind = doc.kind;
    r.ns = doc.ns;
    r.name = doc.name;
    r.labels = doc.labels;
    if (doc.kind == "Pod") {
      r.readiness_delay = ReadinessDelay(doc.body.contains("spec") ? doc.body["spec"] : Json());
    } else if (IsController(doc.kind)) {
      r.desired_replicas = doc.replicas().value_or(1);
      r.pod_labels = doc.pod_labels();
      const Json* spec = doc.body.contains("spec") && doc.body["spec"].contains("template") &&
                                 doc.body["spec"]["template"].contains("spec")
                             ? &doc.body["spec"]["template"]["spec"]
                             : nullptr;
      r.readiness_delay = spec ? ReadinessDelay(*spec) : 0;
      for (int i = 0; i < r.desired_replicas; ++i) {
        ResourceState pod;
        pod.kind = "Pod";
        pod.ns = doc.ns;
        pod.name = doc.name + "-" + std::to_string(i);
        pod.labels = r.pod_labels;
        pod.owner = doc.name;
        r.pods.push_back(pod.name);
        m.resources[ClusterModel::Key(pod.ns, "Pod", pod.name)] = std::move(pod);
      }
    } else if (doc.kind == "Service") {
      const Json spec = doc.body.value("spec", Json::object());
      if (spec.contains("selector") && spec["selector"].is_object()) {
        for (const auto& [k, v] : spec["selector"].items()) {
          r.selector[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
      if (spec.contains("ports") && spec["ports"].is_array()) {
        for (const auto& p : spec["ports"]) {
          if (p.contains("port") && p["port"].is_number_integer()) r.ports.push_back(p["port"].get<int>());
        }
      }
    } else {
      r.inert = true;
      if (doc.kind != "Namespace" && doc.kind != "ConfigMap" && doc.kind != "Secret" &&
          doc.kind != "ServiceAccount") {
        m.warnings.push_back("unsupported kind " + doc.kind + " '" + doc.name + "' modelled as inert");
      }
    }
    m.resources[ClusterModel::Key(r.ns, r.kind, r.name)] = std::move(r);
  }
  return m;
}

std::optional<std::pair<std::int64_t, std::int64_t>> Timeline::Interval(std::string_view node) const {
  std::optional<std::int64_t> start, end;
  for (const auto& e : events) {
    if (e.node != node) continue;
    (e.kind == TimelineEvent::Kind::kStart ? start : end) = e.t;
  }
  if (!start || !end) return std::nullopt;
  return std::make_pair(*start, *end);
}

Json Timeline::ToJson() const {
  Json ev = Json::array();
  for (const auto& e : events) {
    ev.push_back(Json{{"t", e.t}, {"node", e.node}, {"event", e.kind == TimelineEvent::Kind::kStart ? "start" : "end"}});
  }
  Json tr = Json::object();
  for (const auto& [name, t] : traces) tr[name] = t;
  return Json{{"end", end}, {"events", ev}, {"traces", tr}};
}

namespace {

struct LeafRun {
  const WorkflowNode* node;
  std::int64_t start;
  std::int64_t end;
};

std::int64_t Schedule(const WorkflowNode& n, std::int64_t t, std::vector<LeafRun>& out) {
  switch (n.type) {
    case NodeType::kTask:
    case NodeType::kFailure:
      out.push_back({&n, t, t + n.duration.seconds()});
      return t + n.duration.seconds();
    case NodeType::kSuspend:
      return t + (n.deadline.is_zero() ? n.duration : n.deadline).seconds();
    case NodeType::kSerial: {
      std::int64_t cur = t;
      for (const auto& c : n.children) cur = Schedule(c, cur, out);
      return std::max(cur, t + n.stage_length.seconds());
    }
    case NodeType::kParallel: {
      std::int64_t end = t;
      for (const auto& c : n.children) end = std::max(end, Schedule(c, t, out));
      return end;
    }
  }
  return t;
}

bool ExpressionMatch(const ExpressionRequirement& e, const LabelMap& labels) {
  auto it = labels.find(e.key);
  const bool has = it != labels.end();
  const bool in = has && std::find(e.values.begin(), e.values.end(), it->second) != e.values.end();
  if (e.op == "In") return in;
  if (e.op == "NotIn") return !in;
  if (e.op == "Exists") return has;
  if (e.op == "DoesNotExist") return !has;
  return false;
}

bool PodMatches(const ResourceState& r, const SelectorSpec& sel) {
  if (r.kind != "Pod" || r.phase != PodPhase::kRunning || sel.empty()) return false;
  if (!sel.namespaces.empty() && std::find(sel.namespaces.begin(), sel.namespaces.end(), r.ns) == sel.namespaces.end()) {
    return false;
  }
  if (!LabelsMatch(sel.label_selectors, r.labels)) return false;
  for (const auto& e : sel.expression_selectors) {
    if (!ExpressionMatch(e, r.labels)) return false;
  }
  if (!sel.pod_phase_selectors.empty() &&
      std::find(sel.pod_phase_selectors.begin(), sel.pod_phase_selectors.end(), "Running") ==
          sel.pod_phase_selectors.end()) {
    return false;
  }
  if (!sel.pods.empty()) {
    auto it = sel.pods.find(r.ns);
    return it != sel.pods.end() && std::find(it->second.begin(), it->second.end(), r.name) != it->second.end();
  }
  return true;
}

class Engine {
 public:
  Engine(ClusterModel cluster, const SimulationOptions& options)
      : m_(std::move(cluster)), opt_(options), rng_(options.seed) {}

  ClusterModel& model() { return m_; }
  std::vector<std::string>& warnings() { return warnings_; }

  std::vector<ResourceState*> Select(const Fault& f) {
    const SelectorSpec sel = f.scope();
    std::vector<ResourceState*> out;
    if (sel.empty()) return out;
    if (!sel.annotation_selectors.empty() || !sel.field_selectors.empty() || !sel.node_selectors.empty() ||
        !sel.nodes.empty()) {
      warnings_.push_back(std::string(FaultKindName(f.kind)) +
                          ": annotation, field and node selectors are not modelled and were ignored");
    }
    for (auto& [k, r] : m_.resources) {
      if (PodMatches(r, sel)) out.push_back(&r);
    }
    return Pick(f, std::move(out));
  }

  void Start(const WorkflowNode& n) {
    const Fault& f = *n.fault;
    auto pods = Select(f);
    if (pods.empty()) {
      warnings_.push_back(n.name + ": selector matched no running pods; injection had no effect");
      return;
    }
    const std::string action = f.params.value("action", "");
    std::vector<std::string>& touched = active_[n.name];
    for (auto* p : pods) {
      touched.push_back(ClusterModel::Key(p->ns, "Pod", p->name));
      switch (f.kind) {
        case FaultKind::kPodChaos:
          if (action == "container-kill") {
            RestartInPlace(*p);
          } else {
            Kill(*p);
          }
          break;
        case FaultKind::kNetworkChaos:
          if (action == "partition") {
            p->unreachable = true;
          } else {
            p->delayed = true;
          }
          break;
        case FaultKind::kHTTPChaos:
          if (f.params.value("abort", false)) {
            p->unreachable = true;
          } else {
            p->delayed = true;
          }
          break;
        case FaultKind::kStressChaos:
          p->stressed = true;
          break;
        case FaultKind::kDNSChaos:
        case FaultKind::kIOChaos:
        case FaultKind::kTimeChaos:
          break;
      }
    }
  }

  void End(const WorkflowNode& n) {
    auto it = active_.find(n.name);
    if (it == active_.end()) return;
    for (const auto& key : it->second) {
      auto r = m_.resources.find(key);
      if (r == m_.resources.end()) continue;
      switch (n.fault->kind) {
        case FaultKind::kNetworkChaos:
        case FaultKind::kHTTPChaos:
          r->second.delayed = false;
          r->second.unreachable = false;
          break;
        case FaultKind::kStressChaos:
          r->second.stressed = false;
          break;
        default:
          break;
      }
    }
    active_.erase(it);
  }

  void Respawn() {
    for (auto& [k, r] : m_.resources) {
      if (!IsController(r.kind)) continue;
      auto& due = r.pending_respawns;
      while (!due.empty() && due.front() <= m_.clock) {
        due.erase(due.begin());
        for (const auto& name : r.pods) {
          auto* pod = m_.Get(r.ns, "Pod", name);
          if (pod && pod->phase == PodPhase::kAbsent) {
            pod->phase = PodPhase::kRunning;
            pod->ready_at = m_.clock + (opt_.readiness_delays ? r.readiness_delay : 0);
            break;
          }
        }
      }
    }
  }

  double Sample(const WorkflowNode& task) {
    const VaCSpec& vac = *task.vac;
    const ThresholdSpec& th = *task.threshold;
    if (vac.tool == ProbeTool::kLoadTest) return FailureRate(vac.target);
    const auto& t = vac.target;
    std::vector<const ResourceState*> pods;
    int desired = 0;
    if (IsController(t.kind) && !t.name.empty()) {
      if (const auto* c = m_.Get(t.ns, t.kind, t.name)) {
        desired = c->desired_replicas;
        for (const auto& p : c->pods) {
          if (const auto* pod = m_.Get(t.ns, "Pod", p)) pods.push_back(pod);
        }
      }
    } else if (t.kind == "Pod" && !t.name.empty()) {
      if (const auto* pod = m_.Get(t.ns, "Pod", t.name)) pods.push_back(pod);
      desired = 1;
    } else {
      for (const auto* pod : m_.Pods()) {
        if (pod->ns == t.ns && !t.label_selector.empty() && LabelsMatch(t.label_selector, pod->labels)) {
          pods.push_back(pod);
        }
      }
      desired = static_cast<int>(pods.size());
    }
    int running = 0, ready = 0;
    for (const auto* p : pods) {
      running += p->phase == PodPhase::kRunning ? 1 : 0;
      ready += Ready(*p) ? 1 : 0;
    }
    ready = std::min(ready, std::max(desired, 0));
    switch (th.metric) {
      case ThresholdMetric::kRunningRatio:
        return running;
      case ThresholdMetric::kReadyRatio:
        return desired > 0 ? static_cast<double>(ready) / desired : 0.0;
      case ThresholdMetric::kReadyReplicasMin:
        return ready;
      case ThresholdMetric::kRequestFailureRate:
        return FailureRate(t);
    }
    return 0.0;
  }

 private:
  bool Ready(const ResourceState& pod) const {
    if (opt_.stress_degrades_readiness && pod.stressed) return false;
    return m_.PodReady(pod);
  }

  double FailureRate(const ProbeTarget& t) {
    static const std::regex kHost(R"(^(?:https?://)?([a-z0-9-]+)\.([a-z0-9-]+)\.svc(?:\.cluster\.local)?(?::[0-9]+)?(?:/.*)?$)");
    std::smatch m;
    std::string svc_name = t.name, ns = t.ns;
    if (std::regex_match(t.url, m, kHost)) {
      svc_name = m[1];
      ns = m[2];
    }
    const auto* svc = m_.Get(ns, "Service", svc_name);
    if (!svc) {
      if (warned_.insert(svc_name).second) warnings_.push_back("service '" + svc_name + "' not found; requests fail");
      return 1.0;
    }
    int backends = 0, failing = 0;
    for (const auto* pod : m_.Pods()) {
      if (pod->ns != ns || svc->selector.empty() || !LabelsMatch(svc->selector, pod->labels)) continue;
      if (!Ready(*pod)) continue;
      ++backends;
      failing += pod->unreachable ? 1 : 0;
    }
    return backends == 0 ? 1.0 : static_cast<double>(failing) / backends;
  }

  std::vector<ResourceState*> Pick(const Fault& f, std::vector<ResourceState*> pods) {
    if (pods.empty()) return pods;
    const std::string mode = f.params.value("mode", "one");
    if (mode == "all") return pods;
    std::size_t count = 1;
    if (mode != "one") {
      std::int64_t value = 1;
      const Json v = f.params.value("value", Json("1"));
      try {
        value = v.is_string() ? std::stoll(v.get<std::string>()) : v.get<std::int64_t>();
      } catch (const std::exception&) {
        value = 1;
      }
      if (mode == "fixed") {
        count = static_cast<std::size_t>(std::max<std::int64_t>(value, 1));
      } else {
        count = static_cast<std::size_t>(std::max<std::int64_t>(
            static_cast<std::int64_t>(pods.size()) * value / 100, 1));
      }
    }
    count = std::min(count, pods.size());
    std::vector<ResourceState*> out;
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, pods.size() - 1);
      const std::size_t j = pick(rng_);
      out.push_back(pods[j]);
      pods.erase(pods.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return out;
  }

  void Kill(ResourceState& pod) {
    pod.phase = PodPhase::kAbsent;
    pod.stressed = pod.delayed = pod.unreachable = false;
    if (pod.owner.empty()) return;
    for (const auto& kind : {"Deployment", "StatefulSet", "ReplicaSet"}) {
      if (auto* c = m_.Get(pod.ns, kind, pod.owner)) {
        c->pending_respawns.push_back(m_.clock + opt_.restart_delay.seconds());
        std::sort(c->pending_respawns.begin(), c->pending_respawns.end());
        return;
      }
    }
  }

  void RestartInPlace(ResourceState& pod) {
    if (pod.owner.empty()) {
      pod.phase = PodPhase::kAbsent;
      return;
    }
    std::int64_t delay = 0;
    for (const auto& kind : {"Deployment", "StatefulSet", "ReplicaSet"}) {
      if (const auto* c = m_.Get(pod.ns, kind, pod.owner)) delay = opt_.readiness_delays ? c->readiness_delay : 0;
    }
    pod.ready_at = m_.clock + opt_.restart_delay.seconds() + delay;
  }

  ClusterModel m_;
  SimulationOptions opt_;
  std::mt19937_64 rng_;
  std::map<std::string, std::vector<std::string>> active_;
  std::vector<std::string> warnings_;
  std::set<std::string> warned_;
};

}  // namespace

SimulationResult Simulate(const WorkflowNode& tree, ClusterModel cluster, const SimulationOptions& options) {
  std::vector<LeafRun> runs;
  const std::int64_t end = Schedule(tree, 0, runs);
  for (const auto& r : runs) {
    const auto& n = *r.node;
    if (n.type == NodeType::kTask && (!n.vac || !n.threshold)) {
      throw ContractViolation("task '" + n.name + "' has no resolvable probe and threshold");
    }
    if (n.type == NodeType::kFailure && !n.fault) throw ContractViolation("failure '" + n.name + "' has no fault");
  }
  std::stable_sort(runs.begin(), runs.end(), [](const LeafRun& a, const LeafRun& b) { return a.start < b.start; });

  SimulationResult out;
  out.timeline.end = end;
  for (const auto& r : runs) {
    out.timeline.events.push_back({r.start, r.node->name, TimelineEvent::Kind::kStart});
    out.timeline.events.push_back({r.end, r.node->name, TimelineEvent::Kind::kEnd});
    if (r.node->type == NodeType::kTask) {
      out.scheduled_runs.push_back(r.node->name);
      out.timeline.traces[r.node->name] = SampleTrace{r.node->name, {}, r.node->duration};
    }
  }
  std::stable_sort(out.timeline.events.begin(), out.timeline.events.end(),
                   [](const TimelineEvent& a, const TimelineEvent& b) {
                     if (a.t != b.t) return a.t < b.t;
                     return a.kind == TimelineEvent::Kind::kEnd && b.kind == TimelineEvent::Kind::kStart;
                   });

  Engine eng(std::move(cluster), options);
  for (const auto& w : eng.model().warnings) out.warnings.push_back(w);
  for (std::int64_t t = 0; t <= end; ++t) {
    eng.model().clock = t;
    for (const auto& r : runs) {
      if (r.node->type == NodeType::kFailure && r.end == t) eng.End(*r.node);
    }
    eng.Respawn();
    for (const auto& r : runs) {
      if (r.node->type == NodeType::kFailure && r.start == t) eng.Start(*r.node);
    }
    for (const auto& r : runs) {
      if (r.node->type != NodeType::kTask || t < r.start || t >= r.end) continue;
      out.timeline.traces[r.node->name].samples.push_back({t - r.start, eng.Sample(*r.node)});
    }
  }
  for (const auto& r : runs) {
    if (r.node->type != NodeType::kTask) continue;
    auto o = EvaluateThreshold(*r.node->threshold, out.timeline.traces[r.node->name], r.node->name);
    out.outcomes.push_back(std::move(o));
  }
  for (auto& w : eng.warnings()) out.warnings.push_back(std::move(w));
  out.final_state = std::move(eng.model());
  return out;
}

std::vector<std::string> ResolveSelector(const ClusterModel& cluster, const SelectorSpec& selector) {
  std::vector<std::string> out;
  for (const auto& [k, r] : cluster.resources) {
    if (PodMatches(r, selector)) out.push_back(r.ns + "/" + r.name);
  }
  return out;
}

std::vector<std::string> TimelineCheck(const Timeline& timeline, const ExperimentPlan& plan) {
  std::vector<std::string> out;
  const WorkflowNode tree = GroupNodes(plan);
  for (const auto& stage_node : tree.children) {
    if (!stage_node.stage) continue;
    const Stage stage = *stage_node.stage;
    const auto& items = plan.items(stage);
    stage_node.Visit([&](const WorkflowNode& n) {
      if (n.type != NodeType::kTask && n.type != NodeType::kFailure) return;
      if (n.item_index < 0 || n.item_index >= static_cast<int>(items.size())) return;
      const auto& item = items[n.item_index];
      const std::int64_t want_start = (plan.stage_offset(stage) + item.grace_period).seconds();
      const std::int64_t want_end = want_start + item.duration.seconds();
      auto got = timeline.Interval(n.name);
      if (!got) {
        out.push_back(n.name + ": missing from the timeline");
      } else if (got->first != want_start || got->second != want_end) {
        out.push_back(n.name + ": ran [" + std::to_string(got->first) + ", " + std::to_string(got->second) +
                      "), expected [" + std::to_string(want_start) + ", " + std::to_string(want_end) + ")");
      }
    });
  }
  return out;
}

}  // namespace chaoscycle
