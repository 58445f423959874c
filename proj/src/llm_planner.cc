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

#include "chaoscycle/duration.h"
#include "chaoscycle/planner.h"
#include "planner_text.h"

namespace chaoscycle {

using namespace internal;

LlmPlanner::LlmPlanner(std::shared_ptr<ChatClient> client, ChatParams params)
    : client_(std::move(client)), params_(params) {
  if (!client_) throw ContractViolation("LLM planner needs a chat client");
}

Json LlmPlanner::Ask(const std::string& agent, const PromptBindings& bindings, const std::string& phase,
                     const Feedback& feedback, const std::string& schema_condition) {
  const OutputSchema schema = SchemaForAgent(schema_condition.empty() ? agent : agent + ":" + schema_condition);
  const auto messages = WithFeedback(RenderPrompt(GetTemplate(agent), bindings), feedback);
  const ChatResult r = client_->Complete(messages, schema, params_, phase);
  ledger_.Record(phase, r.input_tokens, r.output_tokens);
  return ParseStructuredOutput(r.text, schema);
}

ProjectContext LlmPlanner::Preprocess(const SystemSnapshot& snapshot, const std::string& instructions,
                                      const Feedback& feedback) {
  ProjectContext ctx;
  for (const auto& path : snapshot.manifest_paths) {
    PromptBindings b;
    b.values = {{"manifest_name", snapshot.Display(path)}, {"k8s_yaml", snapshot.files.at(path)}};
    const Json a = Ask("0-0", b, kPhasePreprocess, feedback);
    ctx.summaries.emplace_back(snapshot.Display(path), a.at("k8s_summary").get<std::string>());
  }
  const Json issues = Ask("0-1", {{{"k8s_yamls", YamlListing(snapshot)}}, {}}, kPhasePreprocess, feedback);
  for (const auto& i : issues.at("issues")) {
    ctx.issues.push_back(i.value("issue_name", "") + ": " + i.value("issue_details", ""));
  }
  const Json app = Ask("0-2", {{{"system_overview", ctx.Overview()}}, {}}, kPhasePreprocess, feedback);
  ctx.application = app.at("k8s_application").get<std::string>();
  if (!instructions.empty()) {
    const Json ce = Ask("0-3", {{{"ce_instructions", instructions}}, {}}, kPhasePreprocess, feedback);
    ctx.ce_instructions = ce.at("ce_instructions").get<std::string>();
  }
  return ctx;
}

std::optional<SteadyStateDraft> LlmPlanner::ProposeSteadyState(const SystemSnapshot&, const ProjectContext& context,
                                                               const std::vector<SteadyState>& defined,
                                                               const Feedback& feedback) {
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(defined);
  std::string prev_thought = "(none)";
  if (!defined.empty()) {
    const Json more = Ask("1-4", b, kPhaseHypothesis, feedback);
    if (!more.at("requires_addition").get<bool>()) return std::nullopt;
    prev_thought = more.at("thought").get<std::string>();
  }
  b.values["prev_check_thought"] = prev_thought;
  const Json pick = Ask("1-0", b, kPhaseHypothesis, feedback);
  SteadyStateDraft d;
  d.name = pick.at("name").get<std::string>();
  d.description = pick.at("thought").get<std::string>();
  d.manifest = pick.at("manifest").get<std::string>();

  PromptBindings b1 = BaseBindings(context);
  b1.values["steady_state_name"] = d.name;
  b1.values["steady_state_thought"] = d.description;
  const Json probe = Ask("1-1", b1, kPhaseHypothesis, feedback);
  d.vac.tool = ParseProbeTool(probe.at("tool_type").get<std::string>());
  d.metric = ParseMetric(probe.at("metric").get<std::string>());
  d.vac.target = probe.at("target").get<ProbeTarget>();
  return d;
}

ThresholdSpec LlmPlanner::ProposeThreshold(const SteadyStateDraft& draft, const SampleTrace& baseline,
                                           const ProjectContext& context, const Feedback& feedback) {
  PromptBindings b = BaseBindings(context);
  b.values["steady_state_name"] = draft.name;
  b.values["steady_state_thought"] = draft.description;
  std::string trace = "metric " + std::string(MetricName(draft.metric)) + ", samples:";
  for (const auto& p : baseline.samples) trace += " t=" + std::to_string(p.t) + ":" + std::to_string(p.value);
  b.values["inspection_summary"] = trace;
  return ThresholdFromJson(Ask("1-2", b, kPhaseHypothesis, feedback));
}

ScenarioDraft LlmPlanner::DraftScenario(const SystemSnapshot&, const ProjectContext& context,
                                        const std::vector<SteadyState>& states, const Feedback& feedback) {
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(states);
  const Json a = Ask("1-5", b, kPhaseHypothesis, feedback);
  ScenarioDraft sc;
  sc.event = a.at("event").get<std::string>();
  sc.description = a.at("thought").get<std::string>();
  for (const auto& group : a.at("faults")) {
    std::vector<FaultDraft> g;
    for (const auto& f : group) {
      FaultDraft fd;
      const auto kind = ParseFaultKind(f.at("name").get<std::string>());
      if (!kind) throw ParseError("unsupported fault kind " + f.at("name").dump());
      fd.kind = *kind;
      fd.name_id = f.at("name_id").get<int>();
      fd.scope = f.value("scope", "");
      g.push_back(std::move(fd));
    }
    sc.sequence.push_back(std::move(g));
  }
  return sc;
}

Json LlmPlanner::DetailFault(const SystemSnapshot&, const ProjectContext& context,
                             const std::vector<SteadyState>& states, const ScenarioDraft& scenario,
                             const FaultDraft& fault, const Feedback& feedback) {
  const std::string kind(FaultKindName(fault.kind));
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(states);
  b.values["fault_scenario"] = ScenarioText(scenario);
  b.values["fault_kind"] = kind;
  b.values["fault_name_id"] = std::to_string(fault.name_id);
  b.values["fault_scope"] = fault.scope;
  b.conditions["detailed_param_instructions"] = kind;
  return Ask("1-6", b, kPhaseHypothesis, feedback, kind);
}

ExperimentPlan LlmPlanner::PlanExperiment(const Hypothesis& hypothesis, const ProjectContext& context,
                                          const Feedback& feedback) {
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(hypothesis.steady_states);
  b.values["fault_scenario"] = ScenarioText(hypothesis.scenario);
  const Json times = Ask("2-0", b, kPhaseExperiment, feedback);
  std::map<std::string, Json> stages;
  const char* keys[] = {"pre_validation_time", "fault_injection_time", "post_validation_time"};
  for (Stage s : kStages) {
    PromptBindings bs = b;
    const std::string name(StageName(s));
    bs.values["phase_name"] = name;
    bs.values["phase_total_time"] = times.at(keys[static_cast<int>(s)]).is_string()
                                        ? times.at(keys[static_cast<int>(s)]).get<std::string>()
                                        : times.at(keys[static_cast<int>(s)]).dump();
    bs.conditions["phase_planning_instructions"] = name;
    stages[name] = Ask("2-1", bs, kPhaseExperiment, feedback, name);
  }
  ExperimentPlan plan = PlanFromJson(times, stages, hypothesis, "");
  PromptBindings b2;
  b2.values = {{"time_schedule", FormatDuration(plan.total_time)},
               {"pre_validation_schedule", ScheduleText(plan, Stage::kPreValidation)},
               {"fault_injection_schedule", ScheduleText(plan, Stage::kFaultInjection)},
               {"post_validation_schedule", ScheduleText(plan, Stage::kPostValidation)}};
  plan.summary = Ask("2-2", b2, kPhaseExperiment, feedback).at("summary").get<std::string>();
  return plan;
}

std::string LlmPlanner::Analyze(const AnalysisInput& in, const ProjectContext& context, const Feedback& feedback) {
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = StatesText(in.hypothesis->steady_states);
  b.values["fault_scenario"] = ScenarioText(in.hypothesis->scenario);
  b.values["experiment_summary"] = (in.plan ? PlanText(*in.plan) : "") + in.timeline_summary;
  b.values["experiment_result"] = OutcomesText(in.failed);
  b.values["reconfig_history"] = "";
  return Ask("3-0", b, kPhaseAnalysis, feedback).at("report").get<std::string>();
}

std::vector<ReconfigAction> LlmPlanner::Reconfigure(const ReconfigInput& in, const ProjectContext& context,
                                                    const Feedback& feedback) {
  PromptBindings b = BaseBindings(context);
  b.values["system_overview"] = context.Overview() + "\nCurrent manifests:\n" + YamlListing(*in.snapshot);
  b.values["steady_states"] = StatesText(in.hypothesis->steady_states);
  b.values["fault_scenario"] = ScenarioText(in.hypothesis->scenario);
  b.values["experiment_summary"] = "";
  std::string failed;
  for (const auto& r : in.failed_runs) failed += "- " + r + "\n";
  b.values["experiment_result"] = failed;
  b.values["analysis_report"] = in.report;
  b.values["reconfig_history"] = HistoryText(in.history);
  return ReconfigFromJson(Ask("4-0", b, kPhaseImprovement, feedback));
}

SelectorSpec LlmPlanner::AdjustScope(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                     const Fault& fault, const Feedback& feedback) {
  PromptBindings b;
  b.values = {{"prev_k8s_yamls", changes.Describe()},
              {"curr_k8s_yamls", YamlListing(new_snapshot)},
              {"experiment_summary", ""},
              {"curr_fault", std::string(FaultKindName(fault.kind)) + " " + fault.params.dump()}};
  return SelectorSpec::FromJson(Ask("2-3", b, kPhaseImprovement, feedback).at("selector"));
}

std::optional<ProbeTarget> LlmPlanner::AdjustProbe(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                                   const SteadyState& state, const Feedback& feedback) {
  PromptBindings b;
  b.values = {{"prev_k8s_yamls", changes.Describe()},
              {"curr_k8s_yamls", YamlListing(new_snapshot)},
              {"prev_unittest", state.name + " probing " + Json(state.vac.target).dump()}};
  const Json a = Ask("2-4", b, kPhaseImprovement, feedback);
  if (!a.contains("target") || a["target"].is_null()) return std::nullopt;
  ProbeTarget t = a["target"].get<ProbeTarget>();
  if (t.url.empty()) t.url = state.vac.target.url;
  if (t == state.vac.target) return std::nullopt;
  return t;
}

std::string LlmPlanner::Summarize(const SummaryInput& in, const ProjectContext& context, const Feedback& feedback) {
  PromptBindings b = BaseBindings(context);
  b.values["steady_states"] = in.hypothesis ? StatesText(in.hypothesis->steady_states) : "";
  b.values["fault_scenario"] = in.hypothesis ? ScenarioText(in.hypothesis->scenario) : "";
  std::string results;
  for (const auto& r : in.experiment_results) results += "- " + r + "\n";
  b.values["experiment_summary"] = (in.plan ? PlanText(*in.plan) : "") + results;
  b.values["improvement_history"] = HistoryText(in.history);
  return Ask("EX", b, kPhasePostprocess, feedback).at("summary").get<std::string>();
}

}  // namespace chaoscycle
