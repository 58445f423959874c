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

#include <gtest/gtest.h>

#include "chaoscycle/backend.h"
#include "chaoscycle/error.h"
#include "chaoscycle/llm_client.h"
#include "chaoscycle/planner.h"

namespace chaoscycle {
namespace {

std::string Fixture(const std::string& rel) { return std::string(CHAOSCYCLE_FIXTURES) + "/" + rel; }

TEST(WeaknessTest, NginxBarePod) {
  const SystemSnapshot s = LoadProject(Fixture("nginx"));
  auto w = FindWeaknesses(s);
  ASSERT_FALSE(w.empty());
  EXPECT_EQ(w[0].kind, Weakness::Kind::kSinglePointOfFailure);
  EXPECT_EQ(w[0].doc->name, "example-pod");
}

TEST(WeaknessTest, ResilientHasNone) {
  EXPECT_TRUE(FindWeaknesses(LoadProject(Fixture("nginx-resilient"))).empty());
}

TEST(TotalTimeTest, ParsesInstructions) {
  EXPECT_EQ(TotalTimeFromInstructions("finish within 2 minutes please"), Duration::Seconds(120));
  EXPECT_EQ(TotalTimeFromInstructions("Within 90 seconds"), Duration::Seconds(90));
  EXPECT_EQ(TotalTimeFromInstructions("within 45s"), Duration::Seconds(45));
  EXPECT_EQ(TotalTimeFromInstructions(""), Duration::Seconds(60));
}

TEST(StubPlannerTest, PlanRespectsInstructions) {
  StubPlanner p;
  const SystemSnapshot s = LoadProject(Fixture("nginx"));
  SimulatorBackend backend;
  backend.Deploy(s);
  ProjectContext ctx = p.Preprocess(s, "The experiment must finish within 90 seconds.", {});
  auto draft = p.ProposeSteadyState(s, ctx, {}, {});
  ASSERT_TRUE(draft.has_value());
  EXPECT_EQ(draft->name, "example-pod-running");
  EXPECT_EQ(draft->vac.target.kind, "Pod");
  EXPECT_EQ(draft->vac.target.name, "example-pod");
}


TEST(LlmPlannerTest, PreprocessUsesSummaryAgent) {
  auto transport = std::make_shared<FakeTransport>();
  auto reply = [](const std::string& content) {
    Json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
                 {"usage", {{"prompt_tokens", 100}, {"completion_tokens", 20}}}};
    return HttpResponse{200, body.dump()};
  };
  // One summary per manifest, then issues, application and instructions.
  transport->Push(reply(R"( "Pod example-pod runs nginx"})"));
  transport->Push(reply(R"( "Service example-service exposes port 80"})"));
  transport->Push(reply(R"({"issues": [{"issue_name": "bare pod", "issue_details": "never recreated",
                              "manifests": ["pod.yaml"], "problematic_config": "restartPolicy: Never"}]})"));
  transport->Push(reply(R"({"thought": "nginx image", "k8s_application": "nginx web server"})"));
  transport->Push(reply(R"({"ce_instructions": "finish within 1 minute"})"));
  LlmConfig cfg;
  cfg.api_key = "k";
  auto client = std::make_shared<ChatClient>(cfg, transport);
  LlmPlanner planner(client, ChatParams{});
  const SystemSnapshot s = LoadProject(Fixture("nginx"));
  ProjectContext ctx = planner.Preprocess(s, "The whole experiment must finish within 1 minute.", {});
  EXPECT_EQ(transport->requests().size(), 5u);
  ASSERT_EQ(ctx.summaries.size(), 2u);
  EXPECT_EQ(ctx.summaries[0].second, "Pod example-pod runs nginx");
  ASSERT_EQ(ctx.issues.size(), 1u);
  EXPECT_EQ(ctx.issues[0], "bare pod: never recreated");
  EXPECT_EQ(ctx.application, "nginx web server");
  EXPECT_EQ(ctx.ce_instructions, "finish within 1 minute");
  EXPECT_EQ(planner.ledger().Total().input_tokens, 500);
  EXPECT_EQ(planner.ledger().Total().output_tokens, 100);
}

TEST(LlmPlannerTest, InvalidReplyIsParseError) {
  auto transport = std::make_shared<FakeTransport>();
  Json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "no json here"}}}}}},
               {"usage", {{"prompt_tokens", 1}, {"completion_tokens", 1}}}};
  transport->Push(HttpResponse{200, body.dump()});
  LlmConfig cfg;
  cfg.api_key = "k";
  LlmPlanner planner(std::make_shared<ChatClient>(cfg, transport), ChatParams{});
  EXPECT_THROW(planner.Preprocess(LoadProject(Fixture("nginx")), "", {}), ParseError);
}

TEST(SimulatorBackendTest, DryRunResolvesSelectors) {
  SimulatorBackend b;
  Fault ok{FaultKind::kPodChaos, 0,
           Json{{"action", "pod-kill"}, {"mode", "one"},
                {"selector", {{"namespaces", {"default"}}, {"labelSelectors", {{"app", "example"}}}}}}};
  EXPECT_THROW(b.DryRunFault(ok), BackendError);
  b.Deploy(LoadProject(Fixture("nginx")));
  EXPECT_TRUE(b.DryRunFault(ok).empty());
  Fault ghost = ok;
  ghost.params["selector"]["labelSelectors"]["app"] = "ghost";
  EXPECT_FALSE(b.DryRunFault(ghost).empty());
  Fault invalid = ok;
  invalid.params["action"] = "pod-failure";
  EXPECT_FALSE(b.DryRunFault(invalid).empty());
}

TEST(SimulatorBackendTest, InspectSamplesHealthyPod) {
  SimulatorBackend b;
  b.Deploy(LoadProject(Fixture("nginx")));
  VaCSpec vac;
  vac.tool = ProbeTool::kClusterApi;
  vac.target.kind = "Pod";
  vac.target.name = "example-pod";
  SampleTrace t = b.Inspect("example-pod-running", vac, ThresholdMetric::kRunningRatio, Duration::Seconds(5));
  ASSERT_FALSE(t.samples.empty());
  EXPECT_DOUBLE_EQ(AggregateTrace(ThresholdMetric::kRunningRatio, t), 1.0);
}

TEST(LiveBackendTest, DryRunsThroughKubectl) {
  std::vector<std::vector<std::string>> calls;
  LiveBackend b("kubectl", [&](const std::vector<std::string>& argv) {
    calls.push_back(argv);
    return CommandResult{argv.back().find("bad") != std::string::npos ? 1 : 0, "denied"};
  });
  b.Deploy(LoadProject(Fixture("nginx")));
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_EQ(calls[0][0], "kubectl");
  EXPECT_NE(std::find(calls[0].begin(), calls[0].end(), "--dry-run=server"), calls[0].end());
  Fault f{FaultKind::kPodChaos, 0,
          Json{{"action", "pod-kill"}, {"mode", "one"}, {"selector", {{"namespaces", {"default"}}}}}};
  EXPECT_TRUE(b.DryRunFault(f).empty());
  Json res = LiveBackend::FaultResource(f);
  EXPECT_EQ(res["apiVersion"], "chaos-mesh.org/v1alpha1");
  EXPECT_EQ(res["kind"], "PodChaos");
  EXPECT_EQ(res["spec"]["action"], "pod-kill");
  EXPECT_THROW(b.Run(WorkflowNode{}, ""), BackendError);
}

TEST(MakeBackendTest, Names) {
  EXPECT_EQ(MakeBackend("simulator", 1)->name(), "simulator");
  EXPECT_EQ(MakeBackend("live", 1)->name(), "live");
  EXPECT_THROW(MakeBackend("cloud", 1), ConfigError);
}

}  // namespace
}  // namespace chaoscycle
