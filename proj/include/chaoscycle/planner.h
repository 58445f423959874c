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

// Planner interface plus the rule-based and LLM-backed implementations.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chaoscycle/agent_gateway.h"
#include "chaoscycle/domain.h"
#include "chaoscycle/experiment_compiler.h"
#include "chaoscycle/llm_client.h"
#include "chaoscycle/manifest_io.h"

namespace chaoscycle {

using Feedback = std::vector<Attempt>;

// Ledger phase names, in cycle order.
inline constexpr const char* kPhasePreprocess = "preprocess";
inline constexpr const char* kPhaseHypothesis = "hypothesis";
inline constexpr const char* kPhaseExperiment = "experiment";
inline constexpr const char* kPhaseAnalysis = "analysis";
inline constexpr const char* kPhaseImprovement = "improvement";
inline constexpr const char* kPhasePostprocess = "postprocess";

struct ProjectContext {
  std::vector<std::pair<std::string, std::string>> summaries;  // (display path, summary)
  std::vector<std::string> issues;
  std::string application;
  std::string ce_instructions;
  int max_steady_states = kDefaultMaxSteadyStates;  // set by the orchestrator

  // Text block describing the system, shared by most prompts.
  std::string Overview() const;
};

struct SteadyStateDraft {
  std::string name;
  std::string description;
  std::string manifest;  // project-relative path the state concerns
  ThresholdMetric metric = ThresholdMetric::kRunningRatio;
  VaCSpec vac;           // tool and target; the script path is assigned later
};

struct FaultDraft {
  FaultKind kind = FaultKind::kPodChaos;
  int name_id = 0;
  std::string scope;    // prose description of the pods to hit
  Json params;          // optional proposal; null when only the kind is known
};

struct ScenarioDraft {
  std::string event;
  std::string description;
  std::vector<std::vector<FaultDraft>> sequence;
};

struct AnalysisInput {
  const SystemSnapshot* snapshot = nullptr;
  const Hypothesis* hypothesis = nullptr;
  const ExperimentPlan* plan = nullptr;
  std::string timeline_summary;
  std::vector<VaCOutcome> failed;
};

struct ReconfigInput {
  const SystemSnapshot* snapshot = nullptr;
  const Hypothesis* hypothesis = nullptr;
  std::string report;
  std::vector<std::string> failed_runs;
  std::vector<std::vector<ReconfigAction>> history;
};

struct SummaryInput {
  const SystemSnapshot* initial = nullptr;
  const SystemSnapshot* final_snapshot = nullptr;
  const Hypothesis* hypothesis = nullptr;
  const ExperimentPlan* plan = nullptr;
  std::string status;
  std::vector<std::string> experiment_results;  // one line per executed experiment
  std::vector<std::string> reports;
  std::vector<std::vector<ReconfigAction>> history;
};

// Every method receives the rejected attempts of its verification loop.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string name() const = 0;

  virtual ProjectContext Preprocess(const SystemSnapshot& snapshot, const std::string& instructions,
                                    const Feedback& feedback) = 0;
  // nullopt when no further steady state is needed.
  virtual std::optional<SteadyStateDraft> ProposeSteadyState(const SystemSnapshot& snapshot,
                                                             const ProjectContext& context,
                                                             const std::vector<SteadyState>& defined,
                                                             const Feedback& feedback) = 0;
  virtual ThresholdSpec ProposeThreshold(const SteadyStateDraft& draft, const SampleTrace& baseline,
                                         const ProjectContext& context, const Feedback& feedback) = 0;
  virtual ScenarioDraft DraftScenario(const SystemSnapshot& snapshot, const ProjectContext& context,
                                      const std::vector<SteadyState>& states, const Feedback& feedback) = 0;
  virtual Json DetailFault(const SystemSnapshot& snapshot, const ProjectContext& context,
                           const std::vector<SteadyState>& states, const ScenarioDraft& scenario,
                           const FaultDraft& fault, const Feedback& feedback) = 0;
  virtual ExperimentPlan PlanExperiment(const Hypothesis& hypothesis, const ProjectContext& context,
                                        const Feedback& feedback) = 0;
  virtual std::string Analyze(const AnalysisInput& input, const ProjectContext& context,
                              const Feedback& feedback) = 0;
  virtual std::vector<ReconfigAction> Reconfigure(const ReconfigInput& input, const ProjectContext& context,
                                                  const Feedback& feedback) = 0;
  // Returns the selector to use against the new snapshot.
  virtual SelectorSpec AdjustScope(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                   const Fault& fault, const Feedback& feedback) = 0;
  // nullopt keeps the current target.
  virtual std::optional<ProbeTarget> AdjustProbe(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                                 const SteadyState& state, const Feedback& feedback) = 0;
  virtual std::string Summarize(const SummaryInput& input, const ProjectContext& context,
                                const Feedback& feedback) = 0;

  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }

 protected:
  CostLedger ledger_;
};

// Weak points the rule-based planner looks for.
struct Weakness {
  enum class Kind { kSinglePointOfFailure, kMissingResources };
  Kind kind = Kind::kSinglePointOfFailure;
  const ManifestDoc* doc = nullptr;
  std::string Describe() const;
};
std::vector<Weakness> FindWeaknesses(const SystemSnapshot& snapshot);

// "within 2 minutes" / "within 90 seconds" in the instructions; 60s otherwise.
Duration TotalTimeFromInstructions(const std::string& instructions);

// Deterministic rulebook. Token usage is recorded with the whitespace
// approximation of the prompts it would have sent.
class StubPlanner : public Planner {
 public:
  std::string name() const override { return "stub"; }

  ProjectContext Preprocess(const SystemSnapshot& snapshot, const std::string& instructions,
                            const Feedback& feedback) override;
  std::optional<SteadyStateDraft> ProposeSteadyState(const SystemSnapshot& snapshot, const ProjectContext& context,
                                                     const std::vector<SteadyState>& defined,
                                                     const Feedback& feedback) override;
  ThresholdSpec ProposeThreshold(const SteadyStateDraft& draft, const SampleTrace& baseline,
                                 const ProjectContext& context, const Feedback& feedback) override;
  ScenarioDraft DraftScenario(const SystemSnapshot& snapshot, const ProjectContext& context,
                              const std::vector<SteadyState>& states, const Feedback& feedback) override;
  Json DetailFault(const SystemSnapshot& snapshot, const ProjectContext& context,
                   const std::vector<SteadyState>& states, const ScenarioDraft& scenario, const FaultDraft& fault,
                   const Feedback& feedback) override;
  ExperimentPlan PlanExperiment(const Hypothesis& hypothesis, const ProjectContext& context,
                                const Feedback& feedback) override;
  std::string Analyze(const AnalysisInput& input, const ProjectContext& context, const Feedback& feedback) override;
  std::vector<ReconfigAction> Reconfigure(const ReconfigInput& input, const ProjectContext& context,
                                          const Feedback& feedback) override;
  SelectorSpec AdjustScope(const ChangeSummary& changes, const SystemSnapshot& new_snapshot, const Fault& fault,
                           const Feedback& feedback) override;
  std::optional<ProbeTarget> AdjustProbe(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                         const SteadyState& state, const Feedback& feedback) override;
  std::string Summarize(const SummaryInput& input, const ProjectContext& context,
                        const Feedback& feedback) override;
};

class LlmPlanner : public Planner {
 public:
  LlmPlanner(std::shared_ptr<ChatClient> client, ChatParams params);

  std::string name() const override { return "llm"; }

  ProjectContext Preprocess(const SystemSnapshot& snapshot, const std::string& instructions,
                            const Feedback& feedback) override;
  std::optional<SteadyStateDraft> ProposeSteadyState(const SystemSnapshot& snapshot, const ProjectContext& context,
                                                     const std::vector<SteadyState>& defined,
                                                     const Feedback& feedback) override;
  ThresholdSpec ProposeThreshold(const SteadyStateDraft& draft, const SampleTrace& baseline,
                                 const ProjectContext& context, const Feedback& feedback) override;
  ScenarioDraft DraftScenario(const SystemSnapshot& snapshot, const ProjectContext& context,
                              const std::vector<SteadyState>& states, const Feedback& feedback) override;
  Json DetailFault(const SystemSnapshot& snapshot, const ProjectContext& context,
                   const std::vector<SteadyState>& states, const ScenarioDraft& scenario, const FaultDraft& fault,
                   const Feedback& feedback) override;
  ExperimentPlan PlanExperiment(const Hypothesis& hypothesis, const ProjectContext& context,
                                const Feedback& feedback) override;
  std::string Analyze(const AnalysisInput& input, const ProjectContext& context, const Feedback& feedback) override;
  std::vector<ReconfigAction> Reconfigure(const ReconfigInput& input, const ProjectContext& context,
                                          const Feedback& feedback) override;
  SelectorSpec AdjustScope(const ChangeSummary& changes, const SystemSnapshot& new_snapshot, const Fault& fault,
                           const Feedback& feedback) override;
  std::optional<ProbeTarget> AdjustProbe(const ChangeSummary& changes, const SystemSnapshot& new_snapshot,
                                         const SteadyState& state, const Feedback& feedback) override;
  std::string Summarize(const SummaryInput& input, const ProjectContext& context,
                        const Feedback& feedback) override;

 private:
  Json Ask(const std::string& agent, const PromptBindings& bindings, const std::string& phase,
           const Feedback& feedback, const std::string& schema_condition = "");

  std::shared_ptr<ChatClient> client_;
  ChatParams params_;
  std::string instructions_;
};

// Shared by both planners: the JSON answer of an agent turned into typed values.
ThresholdSpec ThresholdFromJson(const Json& answer);
std::vector<ReconfigAction> ReconfigFromJson(const Json& answer);
// Stage answers keyed by stage name, each shaped like the 2-1 schema.
ExperimentPlan PlanFromJson(const Json& times, const std::map<std::string, Json>& stages,
                            const Hypothesis& hypothesis, const std::string& summary);
// Parses "20s", "1m30s", 20 or "20".
Duration DurationFromJson(const Json& value);

}  // namespace chaoscycle
