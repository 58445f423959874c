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

// Text renderings shared by the planners.
#pragma once

#include <string>
#include <vector>

#include "chaoscycle/planner.h"

namespace chaoscycle::internal {

// Pod spec of a Pod or workload document; nullptr otherwise.
const Json* PodSpecOf(const ManifestDoc& doc);
// Labels of the pods a Pod or workload document creates.
LabelMap PodLabelsOf(const ManifestDoc& doc);
bool IsWorkload(std::string_view kind);

std::string LabelsText(const LabelMap& labels);
std::string DescribeDoc(const ManifestDoc& doc);
std::string YamlListing(const SystemSnapshot& snapshot);
std::string StatesText(const std::vector<SteadyState>& states);
std::string ScenarioText(const ScenarioDraft& scenario);
std::string ScenarioText(const FailureScenario& scenario);
std::string ScheduleText(const ExperimentPlan& plan, Stage stage);
std::string PlanText(const ExperimentPlan& plan);
std::string OutcomesText(const std::vector<VaCOutcome>& outcomes);
std::string HistoryText(const std::vector<std::vector<ReconfigAction>>& history);
std::string ThresholdText(const ThresholdSpec& threshold);

// Bindings every phase-1+ prompt shares.
PromptBindings BaseBindings(const ProjectContext& context);

// "fault-unittest-front-end-replica" -> "front-end-replica".
std::string StateOfRun(std::string_view run);

// Records the whitespace-approximated size of a prompt and its answer.
void AccountApprox(CostLedger& ledger, const std::string& phase, const std::string& agent,
                   const PromptBindings& bindings, const Json& answer);

}  // namespace chaoscycle::internal
