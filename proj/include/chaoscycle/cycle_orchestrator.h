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

// The CE cycle state machine: hypothesis, experiment, analysis, improvement.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaoscycle/backend.h"
#include "chaoscycle/experiment_compiler.h"
#include "chaoscycle/manifest_io.h"
#include "chaoscycle/planner.h"

namespace chaoscycle {

enum class CycleStatus { kSatisfied, kSatisfiedWithoutChange, kRetriesExhausted, kAborted };
std::string_view CycleStatusName(CycleStatus status);

enum class CyclePhase { kPreprocess, kHypothesis, kExperiment, kAnalysis, kImprovement, kPostprocess, kDone };
std::string_view CyclePhaseName(CyclePhase phase);

struct CycleConfig {
  int max_steady_states = kDefaultMaxSteadyStates;
  int max_retries = kDefaultMaxRetries;
  std::uint64_t seed = 0;
  double temperature = 0.0;
  bool clean_before = false;  // live backend only
  bool clean_after = false;   // live backend only
  std::string backend = "simulator";
  std::string instructions;
  std::filesystem::path out_dir = ".";
  std::string stamp;  // cycle_<stamp>; current UTC time when empty
  Duration inspection_time = Duration::Seconds(5);

  std::vector<std::string> Validate() const;
};

struct Improvement {
  ExperimentResult result;
  std::string report;
  std::vector<ReconfigAction> actions;
};

struct CycleState {
  int workspace_version = 0;
  std::vector<Improvement> improvement_history;
  CyclePhase phase = CyclePhase::kPreprocess;
  int retries_used = 0;
  int experiments_run = 0;
};

// One verification loop as it ran.
struct LoopRecord {
  std::string step;
  std::vector<Attempt> transcript;
  bool exhausted = false;
};

// Thrown when a verification loop runs out of attempts.
class PlannerExhausted : public Error {
 public:
  PlannerExhausted(std::string step, std::vector<Attempt> transcript);
  const std::string& step() const { return step_; }
  const std::vector<Attempt>& transcript() const { return transcript_; }

 private:
  std::string step_;
  std::vector<Attempt> transcript_;
};

struct CycleOutput {
  CycleStatus status = CycleStatus::kAborted;
  std::string summary;
  SystemSnapshot initial_snapshot;
  SystemSnapshot final_snapshot;
  CycleState history;
  CostLedger ledger;
  std::optional<ProjectContext> context;
  std::optional<Hypothesis> hypothesis;
  std::optional<ExperimentPlan> plan;
  std::vector<ExperimentResult> results;
  std::vector<std::string> workflows;  // manifest executed by each experiment
  std::vector<LoopRecord> loops;
  std::string diagnostics;
  std::filesystem::path workspace;
};

// Runs the cycle with explicit collaborators.
CycleOutput RunCycle(const SystemSnapshot& snapshot, const CycleConfig& config, Planner& planner, Backend& backend);
// Loads the project and builds the planner and backend the config names
// (planner "stub" or "llm").
CycleOutput RunCycle(const std::filesystem::path& project, const CycleConfig& config,
                     const std::string& planner = "stub");

// Sequential verification loop that throws PlannerExhausted on failure.
class LoopRunner {
 public:
  LoopRunner(int max_retries, std::vector<LoopRecord>* records) : max_retries_(max_retries), records_(records) {}

  template <typename T>
  T Run(const std::string& step, const std::function<T(const Feedback&)>& propose,
        const std::function<std::vector<std::string>(const T&)>& verify,
        const std::function<std::string(const T&)>& show);

  int max_retries() const { return max_retries_; }

 private:
  int max_retries_;
  std::vector<LoopRecord>* records_;
};

struct HypothesisArtifacts {
  std::map<std::string, std::string> scripts;        // file name -> source
  std::map<std::string, std::string> baseline_logs;  // file name -> log
};

Hypothesis HypothesisPhase(const SystemSnapshot& snapshot, const ProjectContext& context, const CycleConfig& config,
                           const std::string& script_dir, Planner& planner, Backend& backend, LoopRunner& loops,
                           HypothesisArtifacts* artifacts = nullptr);

struct ReplanResult {
  Hypothesis hypothesis;
  ExperimentPlan plan;
  std::string workflow;
  std::map<std::string, SelectorSpec> selector_updates;  // failure node -> selector
  std::map<std::string, std::string> script_updates;     // task node -> script path
  HypothesisArtifacts artifacts;
};

// The backend must already run new_snapshot.
ReplanResult ReplanAfterImprovement(const SystemSnapshot& old_snapshot, const SystemSnapshot& new_snapshot,
                                    const Hypothesis& hypothesis, const ExperimentPlan& plan,
                                    const std::string& workflow, const std::string& script_dir,
                                    const CycleConfig& config, Planner& planner, Backend& backend,
                                    LoopRunner& loops);

struct GateDecision {
  bool finish = false;
  std::vector<VaCOutcome> failed;  // outcomes handed to the analysis
  std::string timeline_summary;
};

GateDecision AnalysisGate(const ExecutionReport& report);

// ---------------------------------------------------------------------------

template <typename T>
T LoopRunner::Run(const std::string& step, const std::function<T(const Feedback&)>& propose,
                  const std::function<std::vector<std::string>(const T&)>& verify,
                  const std::function<std::string(const T&)>& show) {
  // Backend failures abort the cycle instead of counting as attempts.
  struct BackendAbort {
    std::string what;
  };
  auto guarded = [&](const Feedback& fb) -> T {
    try {
      return propose(fb);
    } catch (const BackendError& e) {
      throw BackendAbort{e.what()};
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what());
    }
  };
  auto checked = [&](const T& v) -> std::vector<std::string> {
    try {
      return verify(v);
    } catch (const BackendError& e) {
      throw BackendAbort{e.what()};
    } catch (const Error& e) {
      return {e.what()};
    }
  };
  std::optional<LoopOutcome<T>> run;
  try {
    run.emplace(VerificationLoop<T>(guarded, checked, show, max_retries_));
  } catch (const BackendAbort& e) {
    throw BackendError(e.what);
  }
  LoopOutcome<T>& out = *run;
  if (records_) records_->push_back({step, out.transcript, out.exhausted()});
  if (out.exhausted()) throw PlannerExhausted(step, out.transcript);
  return std::move(*out.value);
}

}  // namespace chaoscycle
