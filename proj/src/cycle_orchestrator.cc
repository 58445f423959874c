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

#include "chaoscycle/cycle_orchestrator.h"

#include <chrono>
#include <ctime>
#include <set>

#include "chaoscycle/duration.h"
#include "chaoscycle/vac_harness.h"

namespace chaoscycle {

namespace fs = std::filesystem;

namespace {

std::string UtcStamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d_%H%M%S", &tm);
  return buf;
}

std::string WorkflowName(const std::string& stamp) {
  std::string s = stamp;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return "chaos-experiment-" + s;
}

std::string Join(const std::vector<std::string>& v, const std::string& sep = "\n") {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

std::string FileName(const std::string& path) { return fs::path(path).filename().string(); }

std::array<Duration, 3> StageLengths(const ExperimentPlan& plan) {
  return {plan.pre_time, plan.fault_time, plan.post_time};
}

class PhaseClock {
 public:
  PhaseClock(CostLedger& ledger, const char* phase)
      : ledger_(ledger), phase_(phase), start_(std::chrono::steady_clock::now()) {}
  ~PhaseClock() {
    ledger_.AddWallTime(phase_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }

 private:
  CostLedger& ledger_;
  const char* phase_;
  std::chrono::steady_clock::time_point start_;
};

Json LoopsToJson(const std::vector<LoopRecord>& loops) {
  Json out = Json::array();
  for (const auto& l : loops) {
    Json attempts = Json::array();
    for (const auto& a : l.transcript) attempts.push_back({{"output", a.output}, {"error", a.error}});
    out.push_back({{"step", l.step}, {"attempts", attempts}, {"exhausted", l.exhausted}});
  }
  return out;
}

std::string ResultLine(const ExperimentResult& r) {
  const auto failed = r.FailedRuns();
  if (failed.empty()) return "all " + std::to_string(r.outcomes.size()) + " unit tests passed";
  return std::to_string(failed.size()) + " of " + std::to_string(r.outcomes.size()) +
         " unit tests failed: " + Join(failed, ", ");
}

// Leaf node names of the compiled tree, keyed by item.
struct LeafNames {
  std::map<std::string, std::vector<std::string>> tasks;                  // state -> task nodes
  std::map<std::pair<FaultKind, int>, std::vector<std::string>> failures;  // fault -> failure nodes
};

LeafNames CollectLeaves(const WorkflowNode& tree) {
  LeafNames out;
  tree.Visit([&](const WorkflowNode& n) {
    if (n.type == NodeType::kTask) out.tasks[n.item].push_back(n.name);
    if (n.type == NodeType::kFailure && n.fault) out.failures[{n.fault->kind, n.fault->name_id}].push_back(n.name);
  });
  return out;
}

}  // namespace

std::string_view CycleStatusName(CycleStatus s) {
  switch (s) {
    case CycleStatus::kSatisfied:
      return "satisfied";
    case CycleStatus::kSatisfiedWithoutChange:
      return "satisfied-without-change";
    case CycleStatus::kRetriesExhausted:
      return "retries-exhausted";
    case CycleStatus::kAborted:
      return "aborted";
  }
  return "aborted";
}

std::string_view CyclePhaseName(CyclePhase p) {
  switch (p) {
    case CyclePhase::kPreprocess:
      return kPhasePreprocess;
    case CyclePhase::kHypothesis:
      return kPhaseHypothesis;
    case CyclePhase::kExperiment:
      return kPhaseExperiment;
    case CyclePhase::kAnalysis:
      return kPhaseAnalysis;
    case CyclePhase::kImprovement:
      return kPhaseImprovement;
    case CyclePhase::kPostprocess:
      return kPhasePostprocess;
    case CyclePhase::kDone:
      return "done";
  }
  return "done";
}

std::vector<std::string> CycleConfig::Validate() const {
  std::vector<std::string> v;
  if (max_retries < 1) v.push_back("max_retries must be at least 1");
  if (max_steady_states < 1) v.push_back("max_steady_states must be at least 1");
  if (backend != "simulator" && backend != "live") v.push_back("backend must be simulator or live");
  if (temperature < 0) v.push_back("temperature must be non-negative");
  if (inspection_time.is_zero()) v.push_back("inspection_time must be positive");
  return v;
}

PlannerExhausted::PlannerExhausted(std::string step, std::vector<Attempt> transcript)
    : Error("verification loop '" + step + "' exhausted after " + std::to_string(transcript.size()) + " attempts" +
            (transcript.empty() ? std::string() : ": " + transcript.back().error)),
      step_(std::move(step)),
      transcript_(std::move(transcript)) {}

GateDecision AnalysisGate(const ExecutionReport& report) {
  GateDecision d;
  d.finish = HypothesisSatisfied(report.result);
  if (d.finish) return d;
  for (const auto& o : report.result.outcomes) {
    if (!o.passed) d.failed.push_back(o);
  }
  d.timeline_summary = report.summary;
  return d;
}

Hypothesis HypothesisPhase(const SystemSnapshot& snapshot, const ProjectContext& context, const CycleConfig& config,
                           const std::string& script_dir, Planner& planner, Backend& backend, LoopRunner& loops,
                           HypothesisArtifacts* artifacts) {
  struct Proposal {
    std::optional<SteadyStateDraft> draft;
    SampleTrace baseline;
  };
  std::vector<SteadyState> states;
  while (static_cast<int>(states.size()) < config.max_steady_states) {
    const std::string step = "steady state " + std::to_string(states.size() + 1);
    Proposal p = loops.Run<Proposal>(
        step,
        [&](const Feedback& fb) {
          Proposal out;
          out.draft = planner.ProposeSteadyState(snapshot, context, states, fb);
          if (out.draft) {
            out.baseline = backend.Inspect(out.draft->name, out.draft->vac, out.draft->metric, config.inspection_time);
          }
          return out;
        },
        [&](const Proposal& p) {
          std::vector<std::string> v;
          if (!p.draft) {
            if (states.empty()) v.push_back("at least one steady state is required");
            return v;
          }
          const SteadyStateDraft& d = *p.draft;
          if (!IsValidIdentifier(d.name)) {
            v.push_back("steady state name '" + d.name + "' must be lowercase alphanumerics and hyphens");
          }
          for (const auto& s : states) {
            if (s.name == d.name) v.push_back("steady state '" + d.name + "' is already defined");
          }
          for (auto& e : d.vac.Validate()) v.push_back(std::move(e));
          if (v.empty()) {
            try {
              RenderProbeScript(d.vac, ThresholdSpec{d.metric, Comparator::kAtLeast, 0.0, ""});
            } catch (const Error& e) {
              v.push_back(e.what());
            }
          }
          if (p.baseline.samples.empty()) v.push_back("the probe produced no samples");
          return v;
        },
        [](const Proposal& p) {
          if (!p.draft) return std::string("no further steady state");
          return Json{{"name", p.draft->name}, {"metric", MetricName(p.draft->metric)}, {"vac", p.draft->vac}}.dump();
        });
    if (!p.draft) break;
    SteadyStateDraft d = std::move(*p.draft);
    const double observed = AggregateTrace(d.metric, p.baseline);

    ThresholdSpec threshold = loops.Run<ThresholdSpec>(
        "threshold " + d.name,
        [&](const Feedback& fb) { return planner.ProposeThreshold(d, p.baseline, context, fb); },
        [&](const ThresholdSpec& t) {
          std::vector<std::string> v = t.Validate();
          if (t.metric != d.metric) {
            v.push_back("threshold metric " + std::string(MetricName(t.metric)) + " differs from the probe metric " +
                        std::string(MetricName(d.metric)));
          }
          if (v.empty() && !t.Holds(observed)) {
            v.push_back("the observed normal value " + std::to_string(observed) + " does not satisfy the threshold " +
                        std::string(ComparatorSymbol(t.comparator)) + " " + std::to_string(t.value));
          }
          return v;
        },
        [](const ThresholdSpec& t) { return Json(t).dump(); });

    SteadyState st;
    st.name = d.name;
    st.description = d.description;
    st.threshold = threshold;
    st.vac = d.vac;
    st.vac.script_path = ProbeScriptPath(script_dir, st.name, st.vac);
    st.baseline = p.baseline;
    if (artifacts) {
      artifacts->scripts[FileName(st.vac.script_path)] = RenderProbeScript(st.vac, st.threshold);
      artifacts->baseline_logs["baseline_" + st.name + ".log"] =
          EvaluateThreshold(st.threshold, *st.baseline, "baseline-" + st.name).log;
    }
    states.push_back(std::move(st));
  }

  ScenarioDraft draft = loops.Run<ScenarioDraft>(
      "failure scenario", [&](const Feedback& fb) { return planner.DraftScenario(snapshot, context, states, fb); },
      [](const ScenarioDraft& sc) {
        std::vector<std::string> v;
        if (sc.sequence.empty()) v.push_back("the scenario needs at least one fault");
        std::set<std::pair<FaultKind, int>> ids;
        for (const auto& g : sc.sequence) {
          if (g.empty()) v.push_back("empty fault group");
          for (const auto& f : g) {
            if (f.name_id < 0) v.push_back("name_id must be non-negative");
            if (!ids.insert({f.kind, f.name_id}).second) {
              v.push_back("duplicate fault " + std::string(FaultKindName(f.kind)) + "#" + std::to_string(f.name_id));
            }
          }
        }
        return v;
      },
      [](const ScenarioDraft& sc) {
        Json j = Json::array();
        for (const auto& g : sc.sequence) {
          Json group = Json::array();
          for (const auto& f : g) group.push_back(std::string(FaultKindName(f.kind)) + "#" + std::to_string(f.name_id));
          j.push_back(group);
        }
        return Json{{"event", sc.event}, {"faults", j}}.dump();
      });

  FailureScenario scenario{draft.event, draft.description, {}};
  for (const auto& group : draft.sequence) {
    std::vector<Fault> faults;
    for (const auto& fd : group) {
      const std::string step = "fault " + std::string(FaultKindName(fd.kind)) + "#" + std::to_string(fd.name_id);
      Json params = loops.Run<Json>(
          step, [&](const Feedback& fb) { return planner.DetailFault(snapshot, context, states, draft, fd, fb); },
          [&](const Json& params) {
            if (!params.is_object()) return std::vector<std::string>{"parameters must be a JSON object"};
            Fault f{fd.kind, fd.name_id, params};
            return backend.DryRunFault(f);
          },
          [](const Json& params) { return params.dump(); });
      faults.push_back(Fault{fd.kind, fd.name_id, std::move(params)});
    }
    scenario.sequence.push_back(std::move(faults));
  }
  return Hypothesis::Make(std::move(states), std::move(scenario), config.max_steady_states);
}

ReplanResult ReplanAfterImprovement(const SystemSnapshot& old_snapshot, const SystemSnapshot& new_snapshot,
                                    const Hypothesis& hypothesis, const ExperimentPlan& plan,
                                    const std::string& workflow, const std::string& script_dir,
                                    const CycleConfig& config, Planner& planner, Backend& backend,
                                    LoopRunner& loops) {
  const ChangeSummary changes = DiffSnapshots(old_snapshot, new_snapshot);
  const LeafNames leaves = CollectLeaves(CompilePlan(plan, &hypothesis));
  ReplanResult out{hypothesis, plan, workflow, {}, {}, {}};

  std::vector<SteadyState> states = hypothesis.steady_states;
  for (auto& st : states) {
    struct Retarget {
      std::optional<ProbeTarget> target;
      std::optional<SampleTrace> baseline;
    };
    Retarget r = loops.Run<Retarget>(
        "probe " + st.name,
        [&](const Feedback& fb) {
          Retarget out;
          out.target = changes.empty() ? std::nullopt : planner.AdjustProbe(changes, new_snapshot, st, fb);
          if (out.target) {
            VaCSpec vac = st.vac;
            vac.target = *out.target;
            out.baseline = backend.Inspect(st.name, vac, st.threshold.metric, config.inspection_time);
          }
          return out;
        },
        [&](const Retarget& r) {
          std::vector<std::string> v;
          if (!r.target) return v;
          VaCSpec vac = st.vac;
          vac.target = *r.target;
          v = vac.Validate();
          if (v.empty() && r.baseline) {
            const double observed = AggregateTrace(st.threshold.metric, *r.baseline);
            if (!st.threshold.Holds(observed)) {
              v.push_back("the new target observes " + std::to_string(observed) +
                          " under normal operation, which violates the threshold");
            }
          }
          return v;
        },
        [](const Retarget& r) { return r.target ? Json(*r.target).dump() : std::string("unchanged"); });
    if (!r.target || *r.target == st.vac.target) continue;
    st.vac.target = *r.target;
    st.vac.version += 1;
    st.vac.script_path = ProbeScriptPath(script_dir, st.name, st.vac);
    st.baseline = r.baseline;
    out.artifacts.scripts[FileName(st.vac.script_path)] = RenderProbeScript(st.vac, st.threshold);
    if (auto it = leaves.tasks.find(st.name); it != leaves.tasks.end()) {
      for (const auto& node : it->second) out.script_updates[node] = st.vac.script_path;
    }
  }

  FailureScenario scenario = hypothesis.scenario;
  for (auto& group : scenario.sequence) {
    for (auto& f : group) {
      const std::string label = std::string(FaultKindName(f.kind)) + "#" + std::to_string(f.name_id);
      SelectorSpec sel = loops.Run<SelectorSpec>(
          "scope " + label,
          [&](const Feedback& fb) {
            return changes.empty() ? f.scope() : planner.AdjustScope(changes, new_snapshot, f, fb);
          },
          [&](const SelectorSpec& s) {
            Fault probe = f;
            probe.set_scope(s);
            return backend.DryRunFault(probe);
          },
          [](const SelectorSpec& s) { return s.ToJson().dump(); });
      if (sel == f.scope()) continue;
      f.set_scope(sel);
      if (auto it = leaves.failures.find({f.kind, f.name_id}); it != leaves.failures.end()) {
        for (const auto& node : it->second) out.selector_updates[node] = sel;
      }
    }
  }

  out.hypothesis = Hypothesis::Make(std::move(states), std::move(scenario),
                                    std::max<int>(config.max_steady_states,
                                                  static_cast<int>(hypothesis.steady_states.size())));
  for (Stage s : kStages) {
    for (auto& item : out.plan.items(s)) {
      if (item.vac()) {
        item.payload = out.hypothesis.Find(item.name)->vac;
      } else if (const Fault* f = item.fault()) {
        for (const auto& nf : out.hypothesis.scenario.AllFaults()) {
          if (nf.kind == f->kind && nf.name_id == f->name_id) item.payload = nf;
        }
      }
    }
  }
  out.workflow = PatchWorkflow(workflow, out.selector_updates, out.script_updates);
  return out;
}

CycleOutput RunCycle(const SystemSnapshot& snapshot, const CycleConfig& config, Planner& planner,
                     Backend& backend) {
  if (auto v = config.Validate(); !v.empty()) throw ConfigError(Join(v, "; "));
  CycleOutput out;
  out.initial_snapshot = snapshot;
  out.final_snapshot = snapshot;
  const std::string stamp = config.stamp.empty() ? UtcStamp() : config.stamp;
  Workspace ws(config.out_dir, stamp);
  out.workspace = ws.root();
  ws.Commit(snapshot);

  const std::string script_dir = ws.volume_prefix() + "/hypothesis";
  LoopRunner loops(config.max_retries, &out.loops);
  CostLedger& ledger = planner.ledger();
  CycleState& state = out.history;
  SystemSnapshot current = snapshot;
  std::vector<std::string> reports;
  auto write_artifacts = [&](const HypothesisArtifacts& a) {
    for (const auto& [f, text] : a.scripts) ws.WriteText(fs::path("hypothesis") / f, text);
    for (const auto& [f, text] : a.baseline_logs) ws.WriteText(fs::path("hypothesis") / f, text);
  };

  try {
    ProjectContext ctx;
    {
      PhaseClock clock(ledger, kPhasePreprocess);
      state.phase = CyclePhase::kPreprocess;
      ctx = loops.Run<ProjectContext>(
          "preprocess", [&](const Feedback& fb) { return planner.Preprocess(snapshot, config.instructions, fb); },
          [](const ProjectContext&) { return std::vector<std::string>{}; },
          [](const ProjectContext& c) { return c.Overview(); });
      ctx.max_steady_states = config.max_steady_states;
      out.context = ctx;
      backend.Deploy(snapshot);
    }

    Hypothesis hyp;
    {
      PhaseClock clock(ledger, kPhaseHypothesis);
      state.phase = CyclePhase::kHypothesis;
      HypothesisArtifacts artifacts;
      hyp = HypothesisPhase(current, ctx, config, script_dir, planner, backend, loops, &artifacts);
      write_artifacts(artifacts);
      ws.WriteText("hypothesis/hypothesis.json", Json(hyp).dump(2) + "\n");
      out.hypothesis = hyp;
    }

    ExperimentPlan plan;
    std::string manifest;
    {
      PhaseClock clock(ledger, kPhaseExperiment);
      state.phase = CyclePhase::kExperiment;
      plan = loops.Run<ExperimentPlan>(
          "experiment plan", [&](const Feedback& fb) { return planner.PlanExperiment(hyp, ctx, fb); },
          [&](const ExperimentPlan& p) { return ValidatePlan(p, &hyp); },
          [](const ExperimentPlan& p) { return Json(p).dump(); });
      manifest = EmitWorkflow(CompilePlan(plan, &hyp), WorkflowMeta{WorkflowName(stamp), ""});
      out.plan = plan;
    }

    while (true) {
      const int k = state.experiments_run + 1;
      ExecutionReport report;
      {
        PhaseClock clock(ledger, kPhaseExperiment);
        state.phase = CyclePhase::kExperiment;
        ws.WriteText("experiment/plan_" + std::to_string(k) + ".json", Json(plan).dump(2) + "\n");
        ws.WriteText("experiment/workflow_" + std::to_string(k) + ".yaml", manifest);
        const ParsedWorkflow parsed = ParseWorkflow(manifest, &hyp, StageLengths(plan));
        report = backend.Run(parsed.tree, manifest);
        ++state.experiments_run;
        out.workflows.push_back(manifest);
        out.results.push_back(report.result);
        const fs::path dir = fs::path("results") / ("experiment_" + std::to_string(k));
        ws.WriteText(dir / "timeline.json", report.timeline.dump(2) + "\n");
        ws.WriteText(dir / "outcomes.json", Json(report.result).dump(2) + "\n");
        for (const auto& o : report.result.outcomes) ws.WriteText(dir / (o.name + ".log"), o.log);
        if (!report.warnings.empty()) ws.WriteText(dir / "warnings.txt", Join(report.warnings) + "\n");
      }

      GateDecision gate;
      std::string analysis;
      {
        PhaseClock clock(ledger, kPhaseAnalysis);
        state.phase = CyclePhase::kAnalysis;
        gate = AnalysisGate(report);
        if (gate.finish) {
          out.status = state.improvement_history.empty() ? CycleStatus::kSatisfiedWithoutChange
                                                         : CycleStatus::kSatisfied;
          break;
        }
        if (static_cast<int>(state.improvement_history.size()) >= config.max_retries) {
          out.status = CycleStatus::kRetriesExhausted;
          out.diagnostics = "the hypothesis still fails after " + std::to_string(state.improvement_history.size()) +
                            " improvement(s): " + Join(report.result.FailedRuns(), ", ");
          break;
        }
        AnalysisInput in{&current, &hyp, &plan, gate.timeline_summary, gate.failed};
        analysis = loops.Run<std::string>(
            "analysis " + std::to_string(k), [&](const Feedback& fb) { return planner.Analyze(in, ctx, fb); },
            [](const std::string& r) {
              return r.empty() ? std::vector<std::string>{"the report is empty"} : std::vector<std::string>{};
            },
            [](const std::string& r) { return r; });
        ws.WriteText("analysis/report_" + std::to_string(k) + ".md", analysis);
        reports.push_back(analysis);
      }

      {
        PhaseClock clock(ledger, kPhaseImprovement);
        state.phase = CyclePhase::kImprovement;
        std::vector<std::vector<ReconfigAction>> history;
        for (const auto& h : state.improvement_history) history.push_back(h.actions);
        ReconfigInput in{&current, &hyp, analysis, report.result.FailedRuns(), history};
        std::vector<ReconfigAction> actions = loops.Run<std::vector<ReconfigAction>>(
            "reconfiguration " + std::to_string(k),
            [&](const Feedback& fb) { return planner.Reconfigure(in, ctx, fb); },
            [&](const std::vector<ReconfigAction>& a) {
              std::vector<std::string> v;
              if (a.empty()) v.push_back("no reconfiguration was proposed");
              for (const auto& prev : history) {
                if (prev == a) v.push_back("this batch repeats an earlier reconfiguration");
              }
              if (v.empty()) {
                try {
                  ApplyReconfig(current, a);
                } catch (const Error& e) {
                  v.push_back(e.what());
                }
              }
              return v;
            },
            [](const std::vector<ReconfigAction>& a) { return Json(a).dump(); });
        SystemSnapshot next = ApplyReconfig(current, actions);
        ws.Commit(next);
        ws.WriteText("analysis/reconfiguration_" + std::to_string(k) + ".json", Json(actions).dump(2) + "\n");
        backend.Deploy(next);
        state.improvement_history.push_back({report.result, analysis, actions});
        state.retries_used = static_cast<int>(state.improvement_history.size());
        state.workspace_version = next.version;

        ReplanResult rp = ReplanAfterImprovement(current, next, hyp, plan, manifest, script_dir, config, planner,
                                                 backend, loops);
        write_artifacts(rp.artifacts);
        hyp = std::move(rp.hypothesis);
        plan = std::move(rp.plan);
        manifest = std::move(rp.workflow);
        out.hypothesis = hyp;
        out.plan = plan;
        current = std::move(next);
        out.final_snapshot = current;
        ws.WriteText("hypothesis/hypothesis_v" + std::to_string(current.version) + ".json", Json(hyp).dump(2) + "\n");
      }
    }
  } catch (const PlannerExhausted& e) {
    out.status = CycleStatus::kRetriesExhausted;
    out.diagnostics = e.what();
  } catch (const BackendError& e) {
    out.status = CycleStatus::kAborted;
    out.diagnostics = std::string("backend failure: ") + e.what();
  } catch (const ValidationError& e) {
    out.status = CycleStatus::kAborted;
    out.diagnostics = e.what();
  }
  out.final_snapshot = current;

  {
    PhaseClock clock(ledger, kPhasePostprocess);
    state.phase = CyclePhase::kPostprocess;
    std::vector<std::vector<ReconfigAction>> history;
    for (const auto& h : state.improvement_history) history.push_back(h.actions);
    std::vector<std::string> lines;
    for (const auto& r : out.results) lines.push_back(ResultLine(r));
    SummaryInput in{&out.initial_snapshot, &current, out.hypothesis ? &*out.hypothesis : nullptr,
                    out.plan ? &*out.plan : nullptr, std::string(CycleStatusName(out.status)), lines, reports,
                    history};
    const ProjectContext ctx = out.context.value_or(ProjectContext{});
    try {
      out.summary = loops.Run<std::string>(
          "summary", [&](const Feedback& fb) { return planner.Summarize(in, ctx, fb); },
          [](const std::string& s) {
            return s.empty() ? std::vector<std::string>{"the summary is empty"} : std::vector<std::string>{};
          },
          [](const std::string& s) { return s; });
    } catch (const PlannerExhausted&) {
      out.summary = "# Chaos engineering cycle summary\n\nStatus: " + std::string(CycleStatusName(out.status)) +
                    "\n\nThe planner could not produce a summary.\n";
    }
    if (!out.diagnostics.empty()) out.summary += "\n## Diagnostics\n\n" + out.diagnostics + "\n";
  }
  state.phase = CyclePhase::kDone;
  out.ledger = ledger;

  ws.WriteText("summary.md", out.summary);
  ws.WriteText("ledger.json", out.ledger.ToJson().dump(2) + "\n");
  WriteSnapshot(current, ws.root() / "final");
  Json cycle = {{"status", CycleStatusName(out.status)},
                {"planner", planner.name()},
                {"backend", backend.name()},
                {"workspace_version", current.version},
                {"experiments_run", state.experiments_run},
                {"retries_used", state.retries_used},
                {"diagnostics", out.diagnostics},
                {"verification_loops", LoopsToJson(out.loops)}};
  ws.WriteText("cycle.json", cycle.dump(2) + "\n");
  return out;
}

CycleOutput RunCycle(const fs::path& project, const CycleConfig& config, const std::string& planner_name) {
  if (auto v = config.Validate(); !v.empty()) throw ConfigError(Join(v, "; "));
  std::unique_ptr<Planner> planner;
  if (planner_name == "stub") {
    planner = std::make_unique<StubPlanner>();
  } else if (planner_name == "llm") {
    ChatParams params{config.temperature, static_cast<std::int64_t>(config.seed)};
    auto client = std::make_shared<ChatClient>(LlmConfig::FromEnv(), std::make_shared<HttplibTransport>());
    planner = std::make_unique<LlmPlanner>(client, params);
  } else {
    throw ConfigError("unknown planner '" + planner_name + "' (expected stub or llm)");
  }
  const SystemSnapshot snapshot = LoadProject(project);
  auto backend = MakeBackend(config.backend, config.seed);
  return RunCycle(snapshot, config, *planner, *backend);
}

}  // namespace chaoscycle
