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

#include <algorithm>
#include <set>
#include <sstream>

#include "chaoscycle/duration.h"
#include "chaoscycle/fault_catalog.h"
#include "chaoscycle/planner.h"
#include "chaoscycle/yaml_json.h"
#include "planner_text.h"

namespace chaoscycle {

using namespace internal;

namespace {

enum class Rule { kPodRunning, kAvailability, kReplica, kResources };

struct Candidate {
  SteadyStateDraft draft;
  Rule rule = Rule::kPodRunning;
  const ManifestDoc* doc = nullptr;  // resource whose pods the state watches
  std::size_t order = 0;             // manifest position of the weakness
};

std::size_t IndexOf(const SystemSnapshot& s, const ManifestDoc* doc) {
  for (std::size_t i = 0; i < s.manifests.size(); ++i) {
    if (&s.manifests[i] == doc) return i;
  }
  return s.manifests.size();
}

std::vector<const ManifestDoc*> ServicesSelecting(const SystemSnapshot& s, const ManifestDoc& target) {
  std::vector<const ManifestDoc*> out;
  const LabelMap labels = PodLabelsOf(target);
  for (const auto& d : s.manifests) {
    if (d.kind != "Service" || d.ns != target.ns) continue;
    const LabelMap sel = d.body.value("spec", Json::object()).value("selector", LabelMap{});
    if (sel.empty()) continue;
    bool match = true;
    for (const auto& [k, v] : sel) {
      auto it = labels.find(k);
      match = match && it != labels.end() && it->second == v;
    }
    if (match) out.push_back(&d);
  }
  return out;
}

int FirstPort(const ManifestDoc& svc) {
  const Json spec = svc.body.value("spec", Json::object());
  for (const auto& p : spec.value("ports", Json::array())) return p.value("port", 80);
  return 80;
}

Candidate Availability(const ManifestDoc& svc, const ManifestDoc* backing, std::size_t order) {
  Candidate c;
  c.rule = Rule::kAvailability;
  c.doc = backing;
  c.order = order;
  c.draft.name = svc.name + "-availability";
  c.draft.description = "Service '" + svc.name + "' keeps answering HTTP requests.";
  c.draft.manifest = svc.path;
  c.draft.metric = ThresholdMetric::kRequestFailureRate;
  c.draft.vac.tool = ProbeTool::kLoadTest;
  c.draft.vac.target.ns = svc.ns;
  c.draft.vac.target.kind = "Service";
  c.draft.vac.target.name = svc.name;
  c.draft.vac.target.url =
      "http://" + svc.name + "." + svc.ns + ".svc.cluster.local:" + std::to_string(FirstPort(svc));
  return c;
}

Candidate Replicas(const ManifestDoc& doc, Rule rule, std::size_t order) {
  Candidate c;
  c.rule = rule;
  c.doc = &doc;
  c.order = order;
  c.draft.name = doc.name + (rule == Rule::kReplica ? "-replica" : "-replicas");
  c.draft.description = doc.kind + " '" + doc.name + "' keeps at least one ready replica.";
  c.draft.manifest = doc.path;
  c.draft.metric = ThresholdMetric::kReadyReplicasMin;
  c.draft.vac.tool = ProbeTool::kClusterApi;
  c.draft.vac.target.ns = doc.ns;
  c.draft.vac.target.kind = doc.kind;
  c.draft.vac.target.name = doc.name;
  return c;
}

std::vector<Candidate> ForWeakness(const SystemSnapshot& s, const Weakness& w) {
  std::vector<Candidate> out;
  const std::size_t order = IndexOf(s, w.doc);
  if (w.kind == Weakness::Kind::kMissingResources) {
    out.push_back(Replicas(*w.doc, Rule::kResources, order));
    return out;
  }
  if (w.doc->kind != "Pod") {
    out.push_back(Replicas(*w.doc, Rule::kReplica, order));
    return out;
  }
  Candidate c;
  c.rule = Rule::kPodRunning;
  c.doc = w.doc;
  c.order = order;
  c.draft.name = w.doc->name + "-running";
  c.draft.description = "Pod '" + w.doc->name + "' stays in the Running phase.";
  c.draft.manifest = w.doc->path;
  c.draft.metric = ThresholdMetric::kRunningRatio;
  c.draft.vac.tool = ProbeTool::kClusterApi;
  c.draft.vac.target.ns = w.doc->ns;
  c.draft.vac.target.kind = "Pod";
  c.draft.vac.target.name = w.doc->name;
  out.push_back(c);
  for (const auto* svc : ServicesSelecting(s, *w.doc)) out.push_back(Availability(*svc, w.doc, order));
  return out;
}

// Round-robin over weakness categories, capped, then in manifest order.
std::vector<Candidate> Candidates(const SystemSnapshot& s, int cap) {
  std::vector<Weakness> spof, missing;
  for (const auto& w : FindWeaknesses(s)) {
    (w.kind == Weakness::Kind::kSinglePointOfFailure ? spof : missing).push_back(w);
  }
  std::vector<Candidate> out;
  std::set<std::string> names;
  auto add = [&](const Weakness& w) {
    for (auto& c : ForWeakness(s, w)) {
      if (static_cast<int>(out.size()) >= cap) return;
      if (names.insert(c.draft.name).second) out.push_back(std::move(c));
    }
  };
  for (std::size_t i = 0; i < std::max(spof.size(), missing.size()); ++i) {
    if (i < spof.size()) add(spof[i]);
    if (i < missing.size()) add(missing[i]);
  }
  if (out.empty()) {
    for (const auto& d : s.manifests) {
      if (d.kind == "Service") {
        const ManifestDoc* backing = nullptr;
        for (const auto& w : s.manifests) {
          if ((w.kind == "Pod" || IsWorkload(w.kind)) && !ServicesSelecting(s, w).empty() &&
              ServicesSelecting(s, w).front() == &d) {
            backing = &w;
            break;
          }
        }
        out.push_back(Availability(d, backing, IndexOf(s, &d)));
        break;
      }
    }
  }
  if (out.empty()) {
    for (const auto& d : s.manifests) {
      if (IsWorkload(d.kind)) {
        out.push_back(Replicas(d, Rule::kReplica, IndexOf(s, &d)));
        break;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.order < b.order; });
  return out;
}

const Candidate* FindCandidate(const std::vector<Candidate>& cands, const std::string& name) {
  for (const auto& c : cands) {
    if (c.draft.name == name) return &c;
  }
  return nullptr;
}

Json PodSelector(const ManifestDoc& doc) {
  return Json{{"namespaces", {doc.ns}}, {"labelSelectors", PodLabelsOf(doc)}};
}

// Resources whose pods a steady state watches.
std::vector<const ManifestDoc*> WatchedDocs(const SystemSnapshot& s, const SteadyState& st) {
  std::vector<const ManifestDoc*> out;
  const ProbeTarget& t = st.vac.target;
  LabelMap labels = t.label_selector;
  if (st.vac.tool == ProbeTool::kLoadTest) {
    std::string svc_name = t.name;
    const auto host = t.url.find("://") == std::string::npos ? t.url : t.url.substr(t.url.find("://") + 3);
    if (auto dot = host.find('.'); dot != std::string::npos) svc_name = host.substr(0, dot);
    for (const auto& d : s.manifests) {
      if (d.kind == "Service" && d.name == svc_name) {
        labels = d.body.value("spec", Json::object()).value("selector", LabelMap{});
      }
    }
  } else if (!t.name.empty()) {
    for (const auto& d : s.manifests) {
      if (d.kind == t.kind && d.name == t.name && d.ns == t.ns) out.push_back(&d);
    }
    return out;
  }
  if (labels.empty()) return out;
  for (const auto& d : s.manifests) {
    if (d.kind != "Pod" && !IsWorkload(d.kind)) continue;
    const LabelMap pl = PodLabelsOf(d);
    bool match = true;
    for (const auto& [k, v] : labels) {
      auto it = pl.find(k);
      match = match && it != pl.end() && it->second == v;
    }
    if (match) out.push_back(&d);
  }
  return out;
}

Json FaultFor(Rule rule, const ManifestDoc& doc) {
  const Json sel = PodSelector(doc);
  switch (rule) {
    case Rule::kPodRunning:
    case Rule::kReplica:
      return Json{{"action", "pod-kill"}, {"mode", "one"}, {"selector", sel}};
    case Rule::kAvailability:
      return Json{{"action", "delay"},
                  {"mode", "all"},
                  {"selector", sel},
                  {"direction", "to"},
                  {"device", "eth0"},
                  {"delay", {{"latency", "100ms"}, {"jitter", "10ms"}, {"correlation", "50"}}},
                  {"target", {{"mode", "all"}, {"selector", sel}}}};
    case Rule::kResources: {
      std::string container = doc.name;
      if (const Json* ps = PodSpecOf(doc)) {
        const Json cs = ps->value("containers", Json::array());
        if (!cs.empty()) container = cs[0].value("name", container);
      }
      return Json{{"mode", "all"},
                  {"selector", sel},
                  {"stressors", {{"cpu", {{"workers", 2}, {"load", 80}}}}},
                  {"containerNames", {container}}};
    }
  }
  return Json::object();
}

FaultKind KindFor(Rule rule) {
  switch (rule) {
    case Rule::kAvailability:
      return FaultKind::kNetworkChaos;
    case Rule::kResources:
      return FaultKind::kStressChaos;
    default:
      return FaultKind::kPodChaos;
  }
}

std::string Phrase(Rule rule, const ManifestDoc& doc) {
  switch (rule) {
    case Rule::kAvailability:
      return "network latency towards " + doc.name;
    case Rule::kResources:
      return "CPU pressure on " + doc.name;
    default:
      return "loss of one " + doc.name + " pod";
  }
}

std::string JoinPhrases(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += i + 1 == parts.size() ? " and then " : ", then ";
    out += parts[i];
  }
  return out;
}

std::string NewDeploymentName(const std::string& pod) {
  if (pod.size() > 4 && pod.ends_with("-pod")) return pod.substr(0, pod.size() - 4) + "-deployment";
  return pod + "-deployment";
}

Json PodToDeployment(const ManifestDoc& pod) {
  Json meta = Json::object();
  meta["name"] = NewDeploymentName(pod.name);
  if (pod.body["metadata"].contains("namespace")) meta["namespace"] = pod.body["metadata"]["namespace"];
  if (!pod.labels.empty()) meta["labels"] = pod.labels;
  Json spec = pod.body.value("spec", Json::object());
  spec.erase("restartPolicy");  // Deployments only allow Always
  Json tmeta = Json::object();
  tmeta["labels"] = pod.labels;
  return Json{{"apiVersion", "apps/v1"},
              {"kind", "Deployment"},
              {"metadata", meta},
              {"spec",
               {{"replicas", 3},
                {"selector", {{"matchLabels", pod.labels}}},
                {"template", {{"metadata", tmeta}, {"spec", spec}}}}}};
}

}  // namespace

ProjectContext StubPlanner::Preprocess(const SystemSnapshot& snapshot, const std::string& instructions,
                                       const Feedback&) {
  ProjectContext ctx;
  for (const auto& doc : snapshot.manifests) {
    ctx.summaries.emplace_back(snapshot.Display(doc.key()), DescribeDoc(doc));
    PromptBindings b;
    b.values = {{"manifest_name", snapshot.Display(doc.path)}, {"k8s_yaml", snapshot.files.at(doc.path)}};
    AccountApprox(ledger_, kPhasePreprocess, "0-0", b, Json{{"k8s_summary", ctx.summaries.back().second}});
  }
  Json issues = Json::array();
  for (const auto& w : FindWeaknesses(snapshot)) {
    ctx.issues.push_back(w.Describe());
    issues.push_back({{"issue_name", w.kind == Weakness::Kind::kMissingResources ? "missing resources" : "single point of failure"},
                      {"issue_details", w.Describe()},
                      {"manifests", {w.doc->path}},
                      {"problematic_config", w.doc->kind}});
  }
  AccountApprox(ledger_, kPhasePreprocess, "0-1", {{{"k8s_yamls", YamlListing(snapshot)}}, {}}, {{"issues", issues}});

  std::set<std::string> images;
  for (const auto& doc : snapshot.manifests) {
    if (const Json* ps = PodSpecOf(doc)) {
      for (const auto& c : ps->value("containers", Json::array())) images.insert(c.value("image", ""));
    }
  }
  ctx.application = "'" + snapshot.project_name + "', " + std::to_string(snapshot.manifests.size()) +
                    " manifest(s) running the images";
  for (const auto& i : images) ctx.application += " " + i;
  AccountApprox(ledger_, kPhasePreprocess, "0-2", {{{"system_overview", ctx.Overview()}}, {}},
                {{"thought", "derived from images"}, {"k8s_application", ctx.application}});

  ctx.ce_instructions = instructions;
  if (!instructions.empty()) {
    AccountApprox(ledger_, kPhasePreprocess, "0-3", {{{"ce_instructions", instructions}}, {}},
                  {{"ce_instructions", instructions}});
  }
  return ctx;
}

std::optional<SteadyStateDraft> StubPlanner::ProposeSteadyState(const SystemSnapshot& snapshot,
                                                                const ProjectContext& context,
                                                                const std::vector<SteadyState>& defined,
                                                                const Feedback&) {
  const auto cands = Candidates(snapshot, context.max_steady_states);
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(defined);
  if (!defined.empty()) {
    const bool more = defined.size() < cands.size();
    AccountApprox(ledger_, kPhaseHypothesis, "1-4", b,
                  {{"thought", more ? "another weak point is unobserved" : "every weak point is observed"},
                   {"requires_addition", more}});
    if (!more) return std::nullopt;
  }
  if (defined.size() >= cands.size()) return std::nullopt;
  const SteadyStateDraft& d = cands[defined.size()].draft;
  b.values["prev_check_thought"] = "(none)";
  AccountApprox(ledger_, kPhaseHypothesis, "1-0", b,
                {{"thought", d.description}, {"manifest", d.manifest}, {"name", d.name}});
  PromptBindings b1 = BaseBindings(context);
  b1.values["steady_state_name"] = d.name;
  b1.values["steady_state_thought"] = d.description;
  AccountApprox(ledger_, kPhaseHypothesis, "1-1", b1,
                {{"thought", d.description},
                 {"tool_type", ProbeToolName(d.vac.tool)},
                 {"metric", MetricName(d.metric)},
                 {"target", d.vac.target}});
  return d;
}

ThresholdSpec StubPlanner::ProposeThreshold(const SteadyStateDraft& draft, const SampleTrace& baseline,
                                            const ProjectContext& context, const Feedback&) {
  ThresholdSpec t;
  t.metric = draft.metric;
  switch (draft.metric) {
    case ThresholdMetric::kRunningRatio:
      t = {draft.metric, Comparator::kAtLeast, 0.9, "the pod is Running in at least 90% of the samples"};
      break;
    case ThresholdMetric::kReadyRatio:
      t = {draft.metric, Comparator::kAtLeast, 0.9, "all replicas are ready in at least 90% of the samples"};
      break;
    case ThresholdMetric::kRequestFailureRate:
      t = {draft.metric, Comparator::kAtMost, 0.001, "at most 0.1% of requests fail"};
      break;
    case ThresholdMetric::kReadyReplicasMin:
      t = {draft.metric, Comparator::kAtLeast, 1, "at least one replica is ready at every sample"};
      break;
  }
  PromptBindings b = BaseBindings(context);
  b.values["steady_state_name"] = draft.name;
  b.values["steady_state_thought"] = draft.description;
  b.values["inspection_summary"] = std::to_string(baseline.samples.size()) + " samples, aggregate " +
                                   std::to_string(AggregateTrace(draft.metric, baseline));
  AccountApprox(ledger_, kPhaseHypothesis, "1-2", b,
                {{"thought", t.description},
                 {"threshold",
                  {{"metric", MetricName(t.metric)},
                   {"comparator", ComparatorSymbol(t.comparator)},
                   {"value", t.value},
                   {"description", t.description}}}});
  return t;
}

ScenarioDraft StubPlanner::DraftScenario(const SystemSnapshot& snapshot, const ProjectContext& context,
                                         const std::vector<SteadyState>& states, const Feedback&) {
  const auto cands = Candidates(snapshot, std::max<int>(context.max_steady_states, static_cast<int>(states.size())));
  ScenarioDraft sc;
  std::vector<std::string> phrases;
  std::map<FaultKind, int> ids;
  std::vector<std::pair<FaultKind, Json>> seen;
  for (const auto& st : states) {
    const Candidate* c = FindCandidate(cands, st.name);
    Rule rule = st.vac.tool == ProbeTool::kLoadTest ? Rule::kAvailability : Rule::kPodRunning;
    const ManifestDoc* doc = nullptr;
    if (c && c->doc) {
      rule = c->rule;
      doc = c->doc;
    } else {
      const auto docs = WatchedDocs(snapshot, st);
      if (!docs.empty()) doc = docs.front();
    }
    if (!doc) continue;
    const FaultKind kind = KindFor(rule);
    Json params = FaultFor(rule, *doc);
    if (std::find(seen.begin(), seen.end(), std::make_pair(kind, params)) != seen.end()) continue;
    seen.emplace_back(kind, params);
    FaultDraft f;
    f.kind = kind;
    f.name_id = ids[kind]++;
    f.scope = "pods labelled " + LabelsText(PodLabelsOf(*doc)) + " in namespace " + doc->ns;
    f.params = std::move(params);
    sc.sequence.push_back({f});
    phrases.push_back(Phrase(rule, *doc));
  }
  sc.event = phrases.empty() ? "no targetable workload" : "Peak-hour incident: " + JoinPhrases(phrases);
  sc.description = "Faults are injected one at a time in the order listed, each probing a weak point found in "
                   "the manifests.";
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(states);
  Json faults = Json::array();
  for (const auto& g : sc.sequence) {
    Json group = Json::array();
    for (const auto& f : g) group.push_back({{"name", FaultKindName(f.kind)}, {"name_id", f.name_id}, {"scope", f.scope}});
    faults.push_back(group);
  }
  AccountApprox(ledger_, kPhaseHypothesis, "1-5", b,
                {{"event", sc.event}, {"thought", sc.description}, {"faults", faults}});
  return sc;
}

Json StubPlanner::DetailFault(const SystemSnapshot&, const ProjectContext& context,
                              const std::vector<SteadyState>& states, const ScenarioDraft& scenario,
                              const FaultDraft& fault, const Feedback&) {
  if (fault.params.is_null()) {
    throw ContractViolation("no parameters known for " + std::string(FaultKindName(fault.kind)));
  }
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(states);
  b.values["fault_scenario"] = ScenarioText(scenario);
  b.values["fault_kind"] = FaultKindName(fault.kind);
  b.values["fault_name_id"] = std::to_string(fault.name_id);
  b.values["fault_scope"] = fault.scope;
  b.conditions["detailed_param_instructions"] = FaultKindName(fault.kind);
  AccountApprox(ledger_, kPhaseHypothesis, "1-6", b, fault.params);
  return fault.params;
}

ExperimentPlan StubPlanner::PlanExperiment(const Hypothesis& hypothesis, const ProjectContext& context,
                                           const Feedback&) {
  const std::int64_t total = TotalTimeFromInstructions(context.ce_instructions).seconds();
  const std::int64_t third = total / 3;
  ExperimentPlan plan;
  plan.total_time = Duration::Seconds(total);
  plan.pre_time = Duration::Seconds(third);
  plan.fault_time = Duration::Seconds(third);
  plan.post_time = Duration::Seconds(total - 2 * third);
  for (Stage s : kStages) {
    for (const auto& st : hypothesis.steady_states) {
      plan.items(s).push_back(ScheduleItem::Test(st.name, Duration::Seconds(0), plan.stage_time(s), st.vac));
    }
  }
  const auto& seq = hypothesis.scenario.sequence;
  const std::int64_t groups = static_cast<std::int64_t>(seq.size());
  const std::int64_t slot = groups > 0 ? third / groups : 0;
  for (std::int64_t g = 0; g < groups; ++g) {
    const std::int64_t len = g + 1 == groups ? third - g * slot : slot;
    for (const auto& f : seq[static_cast<std::size_t>(g)]) {
      plan.items(Stage::kFaultInjection)
          .push_back(ScheduleItem::Inject(Duration::Seconds(g * slot), Duration::Seconds(len), f));
    }
  }
  plan.summary = "Each stage lasts about a third of " + FormatDuration(plan.total_time) +
                 ". Every unit test runs for its whole stage; faults run back to back in equal slots of the "
                 "fault-injection stage.";

  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(hypothesis.steady_states);
  b.values["fault_scenario"] = ScenarioText(hypothesis.scenario);
  AccountApprox(ledger_, kPhaseExperiment, "2-0", b,
                {{"thought", "even split"},
                 {"total_time", FormatDuration(plan.total_time)},
                 {"pre_validation_time", FormatDuration(plan.pre_time)},
                 {"fault_injection_time", FormatDuration(plan.fault_time)},
                 {"post_validation_time", FormatDuration(plan.post_time)}});
  for (Stage s : kStages) {
    PromptBindings bs = b;
    bs.values["phase_name"] = StageName(s);
    bs.values["phase_total_time"] = FormatDuration(plan.stage_time(s));
    bs.conditions["phase_planning_instructions"] = StageName(s);
    AccountApprox(ledger_, kPhaseExperiment, "2-1", bs, Json{{"thought", ScheduleText(plan, s)}});
  }
  PromptBindings b2;
  b2.values = {{"time_schedule", FormatDuration(plan.total_time)},
               {"pre_validation_schedule", ScheduleText(plan, Stage::kPreValidation)},
               {"fault_injection_schedule", ScheduleText(plan, Stage::kFaultInjection)},
               {"post_validation_schedule", ScheduleText(plan, Stage::kPostValidation)}};
  AccountApprox(ledger_, kPhaseExperiment, "2-2", b2, {{"summary", plan.summary}});
  return plan;
}

std::string StubPlanner::Analyze(const AnalysisInput& in, const ProjectContext& context, const Feedback&) {
  std::ostringstream os;
  os << "Failed unit tests:\n";
  std::set<std::string> states;
  for (const auto& o : in.failed) {
    os << "- " << o.name << "\n";
    states.insert(StateOfRun(o.name));
  }
  os << "\nLikely causes:\n";
  const auto weaknesses = FindWeaknesses(*in.snapshot);
  for (const auto& name : states) {
    const SteadyState* st = in.hypothesis->Find(name);
    if (!st) continue;
    const auto docs = WatchedDocs(*in.snapshot, *st);
    bool explained = false;
    for (const auto* d : docs) {
      for (const auto& w : weaknesses) {
        if (w.doc == d && w.kind == Weakness::Kind::kSinglePointOfFailure) {
          os << "- " << name << ": " << w.Describe() << ".\n";
          explained = true;
        }
      }
    }
    if (!explained) os << "- " << name << ": the watched pods did not recover within the stage.\n";
  }
  os << "\nCountermeasures:\n";
  os << "- Run bare pods under a Deployment with several replicas so a killed pod is replaced and others keep "
        "serving.\n";
  os << "- Raise the replica count of single-replica workloads.\n";
  const std::string report = os.str();
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(in.hypothesis->steady_states);
  b.values["fault_scenario"] = ScenarioText(in.hypothesis->scenario);
  b.values["experiment_summary"] = in.plan ? PlanText(*in.plan) : "";
  b.values["experiment_result"] = OutcomesText(in.failed);
  b.values["reconfig_history"] = "";
  AccountApprox(ledger_, kPhaseAnalysis, "3-0", b, {{"report", report}});
  return report;
}

std::vector<ReconfigAction> StubPlanner::Reconfigure(const ReconfigInput& in, const ProjectContext& context,
                                                     const Feedback&) {
  const SystemSnapshot& s = *in.snapshot;
  std::vector<const ManifestDoc*> targets;
  for (const auto& run : in.failed_runs) {
    const SteadyState* st = in.hypothesis->Find(StateOfRun(run));
    if (!st) continue;
    for (const auto* d : WatchedDocs(s, *st)) {
      if (std::find(targets.begin(), targets.end(), d) == targets.end()) targets.push_back(d);
    }
  }
  std::sort(targets.begin(), targets.end(), [&](auto* a, auto* b) { return IndexOf(s, a) < IndexOf(s, b); });

  std::map<std::string, std::vector<Json>> files;  // path -> documents after the change
  std::map<std::string, std::string> why;
  for (const auto* d : targets) {
    if (d->kind != "Pod" && !(IsWorkload(d->kind) && d->kind != "DaemonSet")) continue;
    if (!files.count(d->path)) {
      for (const auto* doc : s.InFile(d->path)) files[d->path].push_back(doc->body);
    }
    Json& body = files[d->path][static_cast<std::size_t>(d->index)];
    if (d->kind == "Pod") {
      body = PodToDeployment(*d);
      why[d->path] += "Pod '" + d->name + "' becomes Deployment '" + NewDeploymentName(d->name) +
                      "' with 3 replicas so killed pods are recreated. ";
    } else {
      const int r = d->replicas().value_or(1);
      body["spec"]["replicas"] = r + 1;
      why[d->path] += d->kind + " '" + d->name + "' goes from " + std::to_string(r) + " to " +
                      std::to_string(r + 1) + " replicas. ";
    }
  }
  std::vector<ReconfigAction> out;
  for (const auto& p : s.manifest_paths) {
    auto it = files.find(p);
    if (it == files.end()) continue;
    std::string code;
    for (std::size_t i = 0; i < it->second.size(); ++i) code += (i ? "---\n" : "") + DumpYaml(it->second[i]);
    std::string expl = why[p];
    if (!expl.empty()) expl.pop_back();
    out.push_back({ReconfigMode::kReplace, s.Display(p), expl, code});
  }

  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(in.hypothesis->steady_states);
  b.values["fault_scenario"] = ScenarioText(in.hypothesis->scenario);
  b.values["experiment_summary"] = "";
  b.values["experiment_result"] = "";
  b.values["analysis_report"] = in.report;
  b.values["reconfig_history"] = HistoryText(in.history);
  Json mods = Json::array();
  for (const auto& a : out) mods.push_back(a);
  AccountApprox(ledger_, kPhaseImprovement, "4-0", b, {{"thought", "fix the failing resources"}, {"modified_k8s_yamls", mods}});
  return out;
}

SelectorSpec StubPlanner::AdjustScope(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                      const Fault& fault, const Feedback&) {
  PromptBindings b;
  b.values = {{"prev_k8s_yamls", changes.Describe()},
              {"curr_k8s_yamls", YamlListing(new_snapshot)},
              {"experiment_summary", ""},
              {"curr_fault", fault.params.dump()}};
  AccountApprox(ledger_, kPhaseImprovement, "2-3", b,
                {{"thought", "pod labels are unchanged"}, {"selector", fault.scope().ToJson()}});
  return fault.scope();
}

std::optional<ProbeTarget> StubPlanner::AdjustProbe(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                                    const SteadyState& state, const Feedback&) {
  std::optional<ProbeTarget> out;
  const ProbeTarget& t = state.vac.target;
  if (state.vac.tool == ProbeTool::kClusterApi && !t.name.empty() && !new_snapshot.Find(t.kind, t.name)) {
    for (const auto& f : changes.files) {
      for (const auto& d : f.deltas) {
        if (d.old_kind != t.kind || d.old_name != t.name) continue;
        const ManifestDoc* doc = new_snapshot.Find(d.new_kind, d.new_name);
        if (!doc) continue;
        ProbeTarget nt = t;
        if (t.kind == "Pod") {
          nt.name.clear();
          nt.label_selector = PodLabelsOf(*doc);
        } else {
          nt.kind = doc->kind;
          nt.name = doc->name;
        }
        out = nt;
      }
    }
  }
  PromptBindings b;
  b.values = {{"prev_k8s_yamls", changes.Describe()},
              {"curr_k8s_yamls", YamlListing(new_snapshot)},
              {"prev_unittest", state.name}};
  Json answer = {{"thought", out ? "the probed resource was replaced" : "the probed resource is unchanged"}};
  if (out) answer["target"] = *out;
  AccountApprox(ledger_, kPhaseImprovement, "2-4", b, answer);
  return out;
}

std::string StubPlanner::Summarize(const SummaryInput& in, const ProjectContext& context, const Feedback&) {
  std::ostringstream os;
  os << "# Chaos engineering cycle summary\n\n";
  os << "Status: " << in.status << "\n\n";
  os << "## System\n\n" << context.Overview() << "\n";
  if (in.hypothesis) {
    os << "## Hypothesis\n\nSteady states:\n\n" << StatesText(in.hypothesis->steady_states) << "\n";
    os << "Failure scenario:\n\n" << ScenarioText(in.hypothesis->scenario) << "\n";
  }
  if (in.plan) os << "## Experiment\n\n```\n" << PlanText(*in.plan) << "```\n\n";
  os << "## Results\n\n";
  for (std::size_t i = 0; i < in.experiment_results.size(); ++i) {
    os << "- Experiment " << i + 1 << ": " << in.experiment_results[i] << "\n";
  }
  os << "\n## Improvements\n\n" << HistoryText(in.history) << "\n";
  const std::string text = os.str();
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = in.hypothesis ? StatesText(in.hypothesis->steady_states) : "";
  b.values["fault_scenario"] = in.hypothesis ? ScenarioText(in.hypothesis->scenario) : "";
  b.values["experiment_summary"] = in.plan ? PlanText(*in.plan) : "";
  b.values["improvement_history"] = HistoryText(in.history);
  AccountApprox(ledger_, kPhasePostprocess, "EX", b, {{"summary", text}});
  return text;
}

}  // namespace chaoscycle
