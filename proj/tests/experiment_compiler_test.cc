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

#include "chaoscycle/experiment_compiler.h"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "chaoscycle/error.h"
#include "chaoscycle/yaml_json.h"
#include "golden_plans.h"

namespace chaoscycle {
namespace {

using testing::NginxHypothesis;
using testing::NginxPlan;
using testing::S;
using testing::SockShopHypothesis;
using testing::SockShopPlan;

std::string ReadFixture(const std::string& rel) {
  std::ifstream in(std::string(CHAOSCYCLE_FIXTURES) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + "\n";
  return s;
}

TEST(ValidatePlanTest, GoldenPlansAreValid) {
  auto h = NginxHypothesis();
  EXPECT_EQ(Join(ValidatePlan(NginxPlan(), &h)), "");
  auto s = SockShopHypothesis();
  EXPECT_EQ(Join(ValidatePlan(SockShopPlan(), &s)), "");
}

TEST(ValidatePlanTest, ItemOverrunningStage) {
  auto p = NginxPlan();
  p.items(Stage::kPreValidation)[1].grace_period = S(10);
  p.items(Stage::kPreValidation)[1].duration = S(10);
  auto v = ValidatePlan(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("pre-validation[1]"), std::string::npos);
  EXPECT_NE(v[0].find("20s exceeds the stage time 15s"), std::string::npos);
}

TEST(ValidatePlanTest, SumIdentity) {
  auto p = NginxPlan();
  p.total_time = S(61);
  auto v = ValidatePlan(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("total_time"), std::string::npos);
}

TEST(ValidatePlanTest, FaultOutsideFaultStage) {
  auto p = NginxPlan();
  p.items(Stage::kPostValidation).push_back(ScheduleItem::Inject(S(0), S(5), testing::NginxPodKill()));
  auto v = ValidatePlan(p);
  EXPECT_FALSE(v.empty());
  EXPECT_NE(Join(v).find("only allowed in fault-injection"), std::string::npos);
}

TEST(ValidatePlanTest, UnresolvedNames) {
  auto h = NginxHypothesis();
  auto p = NginxPlan();
  p.items(Stage::kPreValidation)[0].name = "nope";
  auto f = testing::NginxDelay();
  f.name_id = 4;
  p.items(Stage::kFaultInjection)[3].payload = f;
  auto v = Join(ValidatePlan(p, &h));
  EXPECT_NE(v.find("no steady state named 'nope'"), std::string::npos);
  EXPECT_NE(v.find("not part of the failure scenario"), std::string::npos);
}

TEST(ValidatePlanTest, EmptyStageRejected) {
  auto p = NginxPlan();
  p.items(Stage::kPostValidation).clear();
  EXPECT_THROW(GroupNodes(p), ValidationError);
}

TEST(GroupNodesTest, NginxPreStageShape) {
  auto tree = GroupNodes(NginxPlan());
  ASSERT_EQ(tree.children.size(), 3u);
  const auto& pre = tree.children[0];
  EXPECT_EQ(pre.name, "pre-validation-phase");
  ASSERT_EQ(pre.children.size(), 1u);
  const auto& par = pre.children[0];
  EXPECT_EQ(par.type, NodeType::kParallel);
  ASSERT_EQ(par.children.size(), 2u);
  EXPECT_EQ(par.children[0].name, "pre-unittest-example-pod-running");
  EXPECT_EQ(par.children[0].type, NodeType::kTask);
  const auto& wrap = par.children[1];
  EXPECT_EQ(wrap.type, NodeType::kSerial);
  ASSERT_EQ(wrap.children.size(), 2u);
  EXPECT_EQ(wrap.children[0].type, NodeType::kSuspend);
  EXPECT_EQ(wrap.children[0].deadline, S(5));
  EXPECT_EQ(wrap.children[1].name, "pre-unittest-example-service-availability");
}

TEST(GroupNodesTest, SingleGraceZeroItem) {
  auto p = NginxPlan();
  p.items(Stage::kPreValidation).resize(1);
  auto tree = GroupNodes(p);
  const auto& par = tree.children[0].children[0];
  EXPECT_EQ(par.name, "pre-validation-parallel-workflows");
  ASSERT_EQ(par.children.size(), 1u);
  EXPECT_EQ(par.children[0].type, NodeType::kTask);
}

TEST(GroupNodesTest, RepeatedFaultKindsGetIds) {
  auto p = NginxPlan();
  auto second = testing::NginxPodKill();
  second.name_id = 1;
  p.items(Stage::kFaultInjection).push_back(ScheduleItem::Inject(S(20), S(5), second));
  auto tree = GroupNodes(p);
  EXPECT_NE(tree.Find("fault-podchaos-1"), nullptr);
  EXPECT_NE(tree.Find("fault-podchaos-2"), nullptr);
  EXPECT_EQ(tree.Find("fault-podchaos"), nullptr);
}

TEST(GroupNodesTest, DuplicateTestNamesGetSuffix) {
  auto p = NginxPlan();
  p.items(Stage::kPreValidation).push_back(p.items(Stage::kPreValidation)[0]);
  auto tree = GroupNodes(p);
  EXPECT_NE(tree.Find("pre-unittest-example-pod-running-2"), nullptr);
}

TEST(DeadlineTest, NginxArithmetic) {
  auto tree = CompilePlan(NginxPlan());
  EXPECT_EQ(FormatDuration(tree.deadline), "30m51s");
  EXPECT_EQ(FormatDuration(tree.children[0].deadline), "10m10s");
  EXPECT_EQ(FormatDuration(tree.children[1].deadline), "10m30s");
  EXPECT_EQ(FormatDuration(tree.children[2].deadline), "10m11s");
  EXPECT_EQ(FormatDuration(tree.Find("pre-unittest-example-pod-running")->deadline), "5m5s");
  EXPECT_EQ(FormatDuration(tree.Find("pre-validation-suspend-workflow")->deadline), "5m10s");
}

TEST(DeadlineTest, PadIsConfigurable) {
  CompileOptions o;
  o.pad = S(0);
  auto tree = CompilePlan(NginxPlan(), nullptr, o);
  // Without padding the entry deadline is the sum of per-stage critical paths.
  EXPECT_EQ(tree.deadline, S(10 + 30 + 11));
}

TEST(EmitTest, NginxMatchesGolden) {
  auto h = NginxHypothesis();
  auto text = EmitWorkflow(CompilePlan(NginxPlan(), &h), {"chaos-experiment-20241124-132854", ""});
  auto diff = StructuralDiff(ParseYaml(ReadFixture("golden/nginx_workflow.yaml")), ParseYaml(text));
  EXPECT_TRUE(diff.empty()) << Join(diff);
}

TEST(EmitTest, SockShopMatchesGolden) {
  auto h = SockShopHypothesis();
  auto text = EmitWorkflow(CompilePlan(SockShopPlan(), &h), {"chaos-experiment-20241127-045539", ""});
  auto diff = StructuralDiff(ParseYaml(ReadFixture("golden/sockshop_workflow.yaml")), ParseYaml(text));
  EXPECT_TRUE(diff.empty()) << Join(diff);
}

TEST(EmitTest, TemplateOrderIsEntryThenStageBlocks) {
  auto j = WorkflowToJson(CompilePlan(NginxPlan()), {"w", ""});
  const auto& ts = j["spec"]["templates"];
  EXPECT_EQ(ts[0]["name"], "the-entry");
  EXPECT_EQ(ts[1]["name"], "pre-validation-phase");
  EXPECT_EQ(j["spec"]["entry"], "the-entry");
  // Within a block, groups come before leaves.
  std::size_t last_group = 0, first_leaf = ts.size();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::string name = ts[i]["name"];
    if (name.rfind("fault-", 0) != 0 && name != "fault-injection-phase") continue;
    const std::string type = ts[i]["templateType"];
    if (type == "Serial" || type == "Parallel" || type == "Suspend") {
      last_group = i;
    } else {
      first_leaf = std::min(first_leaf, i);
    }
  }
  EXPECT_LT(last_group, first_leaf);
}

TEST(EmitTest, DuplicateNodeNamesRejected) {
  auto tree = CompilePlan(NginxPlan());
  tree.children[1].name = "pre-validation-phase";
  EXPECT_THROW(EmitWorkflow(tree, {"w", ""}), ContractViolation);
}

TEST(ParseWorkflowTest, RoundTrip) {
  auto h = NginxHypothesis();
  auto tree = CompilePlan(NginxPlan(), &h);
  auto parsed = ParseWorkflow(EmitWorkflow(tree, {"w", ""}), &h);
  EXPECT_EQ(parsed.meta.name, "w");
  std::vector<std::tuple<std::string, NodeType, Duration, std::size_t>> a, b;
  tree.Visit([&](const WorkflowNode& n) { a.emplace_back(n.name, n.type, n.deadline, n.children.size()); });
  parsed.tree.Visit([&](const WorkflowNode& n) { b.emplace_back(n.name, n.type, n.deadline, n.children.size()); });
  EXPECT_EQ(a, b);
  const auto* t = parsed.tree.Find("fault-unittest-example-service-availability");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->duration, S(20));
  ASSERT_TRUE(t->threshold.has_value());
  EXPECT_EQ(t->threshold->metric, ThresholdMetric::kRequestFailureRate);
  EXPECT_EQ(t->vac->target.url, "http://example-service.default.svc.cluster.local:80");
  const auto* f = parsed.tree.Find("fault-networkchaos");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->duration, S(20));
  EXPECT_EQ(f->fault->params["delay"]["latency"], "100ms");
}

TEST(ParseWorkflowTest, GoldenParses) {
  auto parsed = ParseWorkflow(ReadFixture("golden/sockshop_workflow.yaml"));
  EXPECT_EQ(FormatDuration(parsed.tree.deadline), "30m45s");
  EXPECT_NE(parsed.tree.Find("fault-stresschaos"), nullptr);
}

TEST(ParseWorkflowTest, MalformedInputs) {
  EXPECT_THROW(ParseWorkflow("kind: Pod\n"), ParseError);
  EXPECT_THROW(ParseWorkflow("kind: Workflow\nspec:\n  entry: a\n  templates:\n  - name: a\n    templateType: Serial\n"
                             "    deadline: 1s\n    children: [b]\n"),
               ParseError);
  EXPECT_THROW(ParseWorkflow("kind: Workflow\nspec:\n  entry: a\n  templates:\n  - name: a\n    templateType: Serial\n"
                             "    deadline: 1s\n    children: [a]\n"),
               ParseError);
}

TEST(PatchTest, EmptyUpdatesAreIdentity) {
  auto text = EmitWorkflow(CompilePlan(NginxPlan()), {"w", ""});
  EXPECT_EQ(PatchWorkflow(text, {}, {}), text);
}

TEST(PatchTest, UnchangedSelectorIsIdentity) {
  auto text = EmitWorkflow(CompilePlan(NginxPlan()), {"w", ""});
  auto sel = SelectorSpec::FromJson(testing::ExampleSelector());
  EXPECT_EQ(PatchWorkflow(text, {{"fault-podchaos", sel}}, {}), text);
}

TEST(PatchTest, ScriptRetargetTouchesOnlyThatTask) {
  auto text = EmitWorkflow(CompilePlan(NginxPlan()), {"w", ""});
  const std::string path = "sandbox/cycle_20241124_132128/unittest_example-pod-running_mod1.py";
  auto patched = PatchWorkflow(text, {}, {{"fault-unittest-example-pod-running", path}});
  auto diff = StructuralDiff(ParseYaml(text), ParseYaml(patched));
  ASSERT_EQ(diff.size(), 1u) << Join(diff);
  EXPECT_NE(diff[0].find("[fault-unittest-example-pod-running].task.container.args"), std::string::npos);
  EXPECT_NE(diff[0].find("_mod1.py --duration 10"), std::string::npos);
}

TEST(PatchTest, SelectorChangeAndErrors) {
  auto text = EmitWorkflow(CompilePlan(NginxPlan()), {"w", ""});
  SelectorSpec sel;
  sel.namespaces = {"default"};
  sel.label_selectors = {{"app", "other"}};
  auto patched = PatchWorkflow(text, {{"fault-podchaos", sel}}, {});
  auto diff = StructuralDiff(ParseYaml(text), ParseYaml(patched));
  ASSERT_EQ(diff.size(), 1u) << Join(diff);
  EXPECT_THROW(PatchWorkflow(text, {{"fault-nope", sel}}, {}), ContractViolation);
  EXPECT_THROW(PatchWorkflow(text, {{"the-entry", sel}}, {}), ContractViolation);
  EXPECT_THROW(PatchWorkflow(text, {}, {{"fault-podchaos", "x.py"}}), ContractViolation);
}

TEST(PlanJsonTest, RoundTrip) {
  const auto p = SockShopPlan();
  Json j = p;
  auto q = j.get<ExperimentPlan>();
  EXPECT_EQ(Json(q).dump(), j.dump());
  EXPECT_EQ(j["stages"]["fault-injection"][3]["fault"]["kind"], "PodChaos");
}

}  // namespace
}  // namespace chaoscycle
