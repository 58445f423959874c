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

// Three-stage experiment plans and their compilation to Chaos Mesh Workflows.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chaoscycle/domain.h"
#include "chaoscycle/vac_harness.h"

namespace chaoscycle {

enum class Stage { kPreValidation, kFaultInjection, kPostValidation };

inline constexpr Stage kStages[] = {Stage::kPreValidation, Stage::kFaultInjection,
                                    Stage::kPostValidation};

// "pre-validation", "fault-injection", "post-validation".
std::string_view StageName(Stage stage);
Stage ParseStage(std::string_view name);
// Leaf prefix: "pre", "fault", "post".
std::string_view StageLeafPrefix(Stage stage);

struct ScheduleItem {
  // Steady-state name for unit tests; fault kind name ("PodChaos") for faults.
  std::string name;
  bool is_fault = false;
  Duration grace_period;
  Duration duration;
  std::variant<VaCSpec, Fault> payload;

  const VaCSpec* vac() const { return std::get_if<VaCSpec>(&payload); }
  const Fault* fault() const { return std::get_if<Fault>(&payload); }

  static ScheduleItem Test(std::string name, Duration grace, Duration duration, VaCSpec vac);
  static ScheduleItem Inject(Duration grace, Duration duration, Fault fault);
};

struct ExperimentPlan {
  Duration total_time;
  Duration pre_time;
  Duration fault_time;
  Duration post_time;
  std::array<std::vector<ScheduleItem>, 3> stages;
  std::string summary;

  Duration stage_time(Stage stage) const;
  Duration stage_offset(Stage stage) const;
  std::vector<ScheduleItem>& items(Stage stage) { return stages[static_cast<int>(stage)]; }
  const std::vector<ScheduleItem>& items(Stage stage) const {
    return stages[static_cast<int>(stage)];
  }
};

// Empty when valid. With a hypothesis, also resolves unit-test names against
// its steady states and fault items against its scenario.
std::vector<std::string> ValidatePlan(const ExperimentPlan& plan,
                                      const Hypothesis* hypothesis = nullptr);

enum class NodeType { kTask, kFailure, kSuspend, kSerial, kParallel };

std::string_view NodeTypeName(NodeType type);

struct WorkflowNode {
  std::string name;
  NodeType type = NodeType::kSerial;
  Duration deadline;
  std::vector<WorkflowNode> children;

  // Leaves. duration is the active time of a task or failure; the suspend
  // wait is carried by deadline.
  Duration duration;
  std::string item;  // steady-state name or fault kind name
  int item_index = -1;  // position in the owning stage's item list, -1 if unknown
  std::optional<VaCSpec> vac;
  std::optional<ThresholdSpec> threshold;
  std::optional<Fault> fault;

  // Stage wrappers only: wall-clock length the stage is held for. Zero when
  // unknown (e.g. a parsed manifest), in which case the stage ends with its
  // last child.
  std::optional<Stage> stage;
  Duration stage_length;

  bool is_leaf() const {
    return type == NodeType::kTask || type == NodeType::kFailure || type == NodeType::kSuspend;
  }
  const WorkflowNode* Find(std::string_view node_name) const;
  // Pre-order visit.
  template <typename F>
  void Visit(F&& f) const {
    f(*this);
    for (const auto& c : children) c.Visit(f);
  }
};

struct CompileOptions {
  Duration pad = Duration::Minutes(5);
  std::string mount = std::string(kVolumeMount);
  std::string claim_name = "pvc";
  std::string volume_name = "pvc-volume";
};

inline constexpr std::string_view kEntryName = "the-entry";

// Builds the entry tree (deadlines unset). Throws ValidationError when the
// plan is invalid.
WorkflowNode GroupNodes(const ExperimentPlan& plan, const Hypothesis* hypothesis = nullptr);

// Fills deadlines bottom-up.
void ComputeDeadlines(WorkflowNode& tree, const CompileOptions& options = {});

// GroupNodes + ComputeDeadlines.
WorkflowNode CompilePlan(const ExperimentPlan& plan, const Hypothesis* hypothesis = nullptr,
                         const CompileOptions& options = {});

struct WorkflowMeta {
  std::string name;
  std::string ns;  // omitted from metadata when empty
};

// Throws ContractViolation on duplicate node names or unrenderable bodies.
Json WorkflowToJson(const WorkflowNode& tree, const WorkflowMeta& meta,
                    const CompileOptions& options = {});
std::string EmitWorkflow(const WorkflowNode& tree, const WorkflowMeta& meta,
                         const CompileOptions& options = {});

struct ParsedWorkflow {
  WorkflowMeta meta;
  WorkflowNode tree;
};

// Rebuilds the tree from a manifest. Task scripts named
// "unittest_<state>_mod<N>" are tied back to the hypothesis' steady states
// when one is given. stage_lengths (pre, fault, post) restore stage timing.
// Throws ParseError on malformed manifests.
ParsedWorkflow ParseWorkflow(std::string_view manifest, const Hypothesis* hypothesis = nullptr,
                             std::optional<std::array<Duration, 3>> stage_lengths = std::nullopt,
                             const CompileOptions& options = {});
ParsedWorkflow ParseWorkflowJson(const Json& manifest, const Hypothesis* hypothesis = nullptr,
                                 std::optional<std::array<Duration, 3>> stage_lengths = std::nullopt,
                                 const CompileOptions& options = {});

// Rewrites only failure selectors and task script paths. Returns the input
// text unchanged when no value actually changes. Throws ContractViolation
// naming an unknown or mistyped node.
std::string PatchWorkflow(std::string_view manifest,
                          const std::map<std::string, SelectorSpec>& selector_updates,
                          const std::map<std::string, std::string>& script_updates,
                          const CompileOptions& options = {});

// Key-sorted manifest with templates ordered by name and deadlines in
// canonical form; the basis of structural comparison.
Json NormalizeManifest(const Json& manifest);
Json NormalizeManifest(std::string_view manifest);
inline Json NormalizeManifest(const std::string& manifest) { return NormalizeManifest(std::string_view(manifest)); }

// Human-readable differences between two normalized manifests (empty when
// structurally equal).
std::vector<std::string> StructuralDiff(const Json& expected, const Json& actual);

void to_json(Json& j, const ScheduleItem& v);
void from_json(const Json& j, ScheduleItem& v);
void to_json(Json& j, const ExperimentPlan& v);
void from_json(const Json& j, ExperimentPlan& v);

}  // namespace chaoscycle
