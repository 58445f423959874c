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
#include <regex>
#include <sstream>

#include "chaoscycle/duration.h"
#include "chaoscycle/planner.h"
#include "planner_text.h"

namespace chaoscycle {

namespace internal {

bool IsWorkload(std::string_view kind) {
  return kind == "Deployment" || kind == "StatefulSet" || kind == "ReplicaSet" || kind == "DaemonSet";
}

const Json* PodSpecOf(const ManifestDoc& doc) {
  const Json& b = doc.body;
  if (doc.kind == "Pod") return b.contains("spec") ? &b["spec"] : nullptr;
  if (IsWorkload(doc.kind) && b.contains("spec") && b["spec"].contains("template") &&
      b["spec"]["template"].contains("spec")) {
    return &b["spec"]["template"]["spec"];
  }
  return nullptr;
}

LabelMap PodLabelsOf(const ManifestDoc& doc) { return doc.kind == "Pod" ? doc.labels : doc.pod_labels(); }

std::string LabelsText(const LabelMap& labels) {
  std::string out;
  for (const auto& [k, v] : labels) out += (out.empty() ? "" : ",") + k + "=" + v;
  return out.empty() ? "(none)" : out;
}

std::string DescribeDoc(const ManifestDoc& doc) {
  std::ostringstream os;
  os << doc.kind << " '" << doc.name << "' in namespace '" << doc.ns << "'";
  if (doc.kind == "Service") {
    const Json& spec = doc.body.value("spec", Json::object());
    LabelMap sel = spec.value("selector", LabelMap{});
    os << " selects pods " << LabelsText(sel);
    if (spec.contains("ports")) {
      os << " on ports";
      for (const auto& p : spec["ports"]) os << " " << p.value("port", 0);
    }
    os << ".";
    return os.str();
  }
  if (auto r = doc.replicas(); r && IsWorkload(doc.kind)) os << " runs " << *r << " replica(s)";
  if (const Json* ps = PodSpecOf(doc)) {
    if (doc.kind == "Pod") os << " (restartPolicy " << ps->value("restartPolicy", std::string("Always")) << ")";
    std::vector<std::string> images;
    bool probes = false, resources = true;
    for (const auto& c : ps->value("containers", Json::array())) {
      images.push_back(c.value("image", std::string("?")));
      probes = probes || c.contains("readinessProbe") || c.contains("livenessProbe");
      resources = resources && c.contains("resources") && !c["resources"].empty();
    }
    os << "; images";
    for (const auto& i : images) os << " " << i;
    os << "; pod labels " << LabelsText(PodLabelsOf(doc));
    os << (probes ? "; health probes set" : "; no health probes");
    os << (resources ? "; resources set" : "; no resource requests or limits");
  }
  os << ".";
  return os.str();
}

std::string YamlListing(const SystemSnapshot& snapshot) {
  std::string out;
  for (const auto& p : snapshot.manifest_paths) {
    auto it = snapshot.files.find(p);
    if (it == snapshot.files.end()) continue;
    out += snapshot.Display(p) + ":\n```yaml\n" + it->second + (it->second.ends_with('\n') ? "" : "\n") + "```\n";
  }
  return out;
}

std::string ThresholdText(const ThresholdSpec& t) {
  std::ostringstream os;
  os << MetricName(t.metric) << " " << ComparatorSymbol(t.comparator) << " " << t.value;
  return os.str();
}

std::string StatesText(const std::vector<SteadyState>& states) {
  if (states.empty()) return "(none yet)";
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    out += std::to_string(i + 1) + ". " + s.name + ": " + s.description + " Threshold: " + ThresholdText(s.threshold) +
           " (" + s.threshold.description + "). Probe: " + std::string(ProbeToolName(s.vac.tool)) + " on ";
    out += s.vac.tool == ProbeTool::kLoadTest ? s.vac.target.url
                                               : s.vac.target.kind + " " +
                                                     (s.vac.target.name.empty() ? LabelsText(s.vac.target.label_selector)
                                                                                : s.vac.target.name);
    out += "\n";
  }
  return out;
}

std::string ScenarioText(const ScenarioDraft& sc) {
  std::string out = "Event: " + sc.event + "\n" + sc.description + "\nInjection order:\n";
  for (std::size_t g = 0; g < sc.sequence.size(); ++g) {
    out += "  step " + std::to_string(g + 1) + ":";
    for (const auto& f : sc.sequence[g]) {
      out += " " + std::string(FaultKindName(f.kind)) + "#" + std::to_string(f.name_id) + " (" + f.scope + ")";
    }
    out += "\n";
  }
  return out;
}

std::string ScenarioText(const FailureScenario& sc) {
  std::string out = "Event: " + sc.event + "\n" + sc.description + "\nInjection order:\n";
  for (std::size_t g = 0; g < sc.sequence.size(); ++g) {
    out += "  step " + std::to_string(g + 1) + ":";
    for (const auto& f : sc.sequence[g]) {
      out += " " + std::string(FaultKindName(f.kind)) + "#" + std::to_string(f.name_id) + " " + f.params.dump();
    }
    out += "\n";
  }
  return out;
}

std::string ScheduleText(const ExperimentPlan& plan, Stage stage) {
  std::string out = std::string(StageName(stage)) + " (" + FormatDuration(plan.stage_time(stage)) + "):\n";
  for (const auto& it : plan.items(stage)) {
    out += "  - " + std::string(it.is_fault ? "fault " : "unit test ") + it.name;
    if (it.is_fault) out += "#" + std::to_string(it.fault()->name_id);
    out += " grace " + FormatDuration(it.grace_period) + ", duration " + FormatDuration(it.duration) + "\n";
  }
  return out;
}

std::string PlanText(const ExperimentPlan& plan) {
  std::string out = "Total " + FormatDuration(plan.total_time) + "\n";
  for (Stage s : kStages) out += ScheduleText(plan, s);
  if (!plan.summary.empty()) out += plan.summary + "\n";
  return out;
}

std::string OutcomesText(const std::vector<VaCOutcome>& outcomes) {
  if (outcomes.empty()) return "(none)";
  std::string out;
  for (const auto& o : outcomes) {
    out += "- " + o.name + ": " + (o.passed ? "passed" : "failed") + "\n";
    if (!o.passed) out += o.log + (o.log.ends_with('\n') ? "" : "\n");
  }
  return out;
}

std::string HistoryText(const std::vector<std::vector<ReconfigAction>>& history) {
  if (history.empty()) return "(no reconfiguration yet)";
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    out += "Improvement " + std::to_string(i + 1) + ":\n";
    for (const auto& a : history[i]) {
      out += "  - " + std::string(ReconfigModeName(a.mode)) + " " + a.fname + ": " + a.explanation + "\n";
    }
  }
  return out;
}

PromptBindings BaseBindings(const ProjectContext& context) {
  PromptBindings b;
  b.values["system_overview"] = context.Overview();
  b.values["ce_instructions"] = context.ce_instructions.empty() ? "(none)" : context.ce_instructions;
  return b;
}

std::string StateOfRun(std::string_view run) {
  for (Stage s : kStages) {
    const std::string prefix = std::string(StageLeafPrefix(s)) + "-unittest-";
    if (run.substr(0, prefix.size()) == prefix) return std::string(run.substr(prefix.size()));
  }
  return std::string(run);
}

void AccountApprox(CostLedger& ledger, const std::string& phase, const std::string& agent,
                   const PromptBindings& bindings, const Json& answer) {
  std::int64_t in = 0;
  for (const auto& m : RenderPrompt(GetTemplate(agent), bindings)) in += ApproximateTokens(m.content);
  ledger.Record(phase, in, ApproximateTokens(answer.dump()), true);
}

}  // namespace internal

using namespace internal;

std::string ProjectContext::Overview() const {
  std::string out = "Application: " + (application.empty() ? std::string("(unknown)") : application) + "\n";
  out += "Manifests:\n";
  for (const auto& [path, summary] : summaries) out += "- " + path + ": " + summary + "\n";
  out += "Known weak points:\n";
  if (issues.empty()) out += "- none identified\n";
  for (const auto& i : issues) out += "- " + i + "\n";
  return out;
}

std::string Weakness::Describe() const {
  if (!doc) return "";
  if (kind == Kind::kMissingResources) {
    return doc->kind + " '" + doc->name + "' (" + doc->path + ") sets no resource requests or limits";
  }
  if (doc->kind == "Pod") {
    const Json* ps = PodSpecOf(*doc);
    const std::string policy = ps ? ps->value("restartPolicy", std::string("Always")) : "Always";
    return "Pod '" + doc->name + "' (" + doc->path + ") is a bare pod with restartPolicy " + policy +
           "; nothing recreates it once it is gone";
  }
  return doc->kind + " '" + doc->name + "' (" + doc->path + ") runs a single replica";
}

std::vector<Weakness> FindWeaknesses(const SystemSnapshot& snapshot) {
  std::vector<Weakness> out;
  const ManifestDoc* missing = nullptr;
  for (const auto& doc : snapshot.manifests) {
    if (doc.kind == "Pod" || (IsWorkload(doc.kind) && doc.kind != "DaemonSet" && doc.replicas().value_or(1) == 1)) {
      out.push_back({Weakness::Kind::kSinglePointOfFailure, &doc});
    }
    if (!missing && IsWorkload(doc.kind)) {
      if (const Json* ps = PodSpecOf(doc)) {
        for (const auto& c : ps->value("containers", Json::array())) {
          if (!c.contains("resources") || c["resources"].empty()) {
            missing = &doc;
            break;
          }
        }
      }
    }
  }
  if (missing) out.push_back({Weakness::Kind::kMissingResources, missing});
  return out;
}

Duration TotalTimeFromInstructions(const std::string& instructions) {
  static const std::regex kWithin(R"(within\s+(\d+)\s*(minutes?|mins?|seconds?|secs?|s\b|m\b))",
                                  std::regex::icase);
  std::smatch m;
  if (!std::regex_search(instructions, m, kWithin)) return Duration::Seconds(60);
  const std::int64_t n = std::stoll(m[1]);
  const char unit = static_cast<char>(std::tolower(static_cast<unsigned char>(m[2].str()[0])));
  return Duration::Seconds(unit == 'm' ? n * 60 : n);
}

Duration DurationFromJson(const Json& value) {
  if (value.is_number_integer()) {
    if (value.get<std::int64_t>() < 0) throw ParseError("negative duration");
    return Duration::Seconds(value.get<std::int64_t>());
  }
  if (!value.is_string()) throw ParseError("duration must be a string like \"20s\"");
  const std::string s = value.get<std::string>();
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return Duration::Seconds(std::stoll(s));
  }
  return ParseDuration(s);
}

ThresholdSpec ThresholdFromJson(const Json& answer) {
  const Json& t = answer.at("threshold");
  ThresholdSpec spec;
  spec.metric = ParseMetric(t.at("metric").get<std::string>());
  spec.comparator = ParseComparator(t.at("comparator").get<std::string>());
  spec.value = t.at("value").get<double>();
  spec.description = t.value("description", "");
  if (auto v = spec.Validate(); !v.empty()) throw ValidationError(v);
  return spec;
}

std::vector<ReconfigAction> ReconfigFromJson(const Json& answer) {
  std::vector<ReconfigAction> out;
  for (const auto& m : answer.at("modified_k8s_yamls")) {
    ReconfigAction a;
    a.mode = ParseReconfigMode(m.at("mod_type").get<std::string>());
    a.fname = m.at("fname").get<std::string>();
    a.explanation = m.value("explanation", "");
    a.code = m.value("code", "");
    out.push_back(std::move(a));
  }
  return out;
}

ExperimentPlan PlanFromJson(const Json& times, const std::map<std::string, Json>& stages,
                            const Hypothesis& hypothesis, const std::string& summary) {
  ExperimentPlan plan;
  plan.total_time = DurationFromJson(times.at("total_time"));
  plan.pre_time = DurationFromJson(times.at("pre_validation_time"));
  plan.fault_time = DurationFromJson(times.at("fault_injection_time"));
  plan.post_time = DurationFromJson(times.at("post_validation_time"));
  plan.summary = summary;
  const auto faults = hypothesis.scenario.AllFaults();
  for (Stage s : kStages) {
    auto it = stages.find(std::string(StageName(s)));
    if (it == stages.end()) throw ParseError("no schedule for stage " + std::string(StageName(s)));
    auto& items = plan.items(s);
    for (const auto& t : it->second.value("unit_tests", Json::array())) {
      const std::string name = t.at("name").get<std::string>();
      const SteadyState* ss = hypothesis.Find(name);
      if (!ss) throw ParseError("unit test '" + name + "' names no defined steady state");
      items.push_back(ScheduleItem::Test(name, DurationFromJson(t.at("grace_period")),
                                         DurationFromJson(t.at("duration")), ss->vac));
    }
    for (const auto& f : it->second.value("fault_injection", Json::array())) {
      const std::string kind = f.at("name").get<std::string>();
      const int id = f.value("name_id", 0);
      auto match = std::find_if(faults.begin(), faults.end(), [&](const Fault& x) {
        return FaultKindName(x.kind) == kind && x.name_id == id;
      });
      if (match == faults.end()) {
        throw ParseError("fault " + kind + "#" + std::to_string(id) + " is not part of the scenario");
      }
      items.push_back(
          ScheduleItem::Inject(DurationFromJson(f.at("grace_period")), DurationFromJson(f.at("duration")), *match));
    }
  }
  return plan;
}

}  // namespace chaoscycle
