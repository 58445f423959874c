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

#include "chaoscycle/vac_harness.h"

#include <gtest/gtest.h>

#include "chaoscycle/error.h"

namespace chaoscycle {
namespace {

VaCSpec PodProbe() {
  VaCSpec v;
  v.tool = ProbeTool::kClusterApi;
  v.target.kind = "Pod";
  v.target.name = "example-pod";
  v.script_path = "sandbox/cycle_x/hypothesis/unittest_example-pod-running_mod0.py";
  return v;
}

VaCSpec HttpProbe() {
  VaCSpec v;
  v.tool = ProbeTool::kLoadTest;
  v.target.url = "http://example-service.default.svc.cluster.local:80";
  v.script_path = "sandbox/cycle_x/hypothesis/unittest_example-service-availability_mod0.js";
  return v;
}

SampleTrace Trace(std::vector<double> values) {
  SampleTrace t{"s", {}, Duration::Seconds(static_cast<std::int64_t>(values.size()))};
  for (std::size_t i = 0; i < values.size(); ++i) t.samples.push_back({static_cast<std::int64_t>(i), values[i]});
  return t;
}

TEST(RunnerTest, ClusterApiCommand) {
  auto r = RunnerCommand(PodProbe(), Duration::Seconds(5));
  EXPECT_EQ(r.image, "chaos-eater/k8sapi:1.0");
  EXPECT_EQ(r.image_pull_policy, "IfNotPresent");
  EXPECT_EQ(r.command, (std::vector<std::string>{"/bin/bash", "-c"}));
  ASSERT_EQ(r.args.size(), 1u);
  EXPECT_EQ(r.args[0],
            "python /chaos-eater/sandbox/cycle_x/hypothesis/unittest_example-pod-running_mod0.py --duration 5");
  ASSERT_GE(r.argv.size(), 2u);
  EXPECT_EQ(r.argv[r.argv.size() - 2], "--duration");
  EXPECT_EQ(r.argv.back(), "5");
}

TEST(RunnerTest, LoadTestCommand) {
  auto r = RunnerCommand(HttpProbe(), Duration::Seconds(20));
  EXPECT_EQ(r.image, "grafana/k6:latest");
  EXPECT_FALSE(r.image_pull_policy.has_value());
  EXPECT_EQ(r.command,
            (std::vector<std::string>{"k6", "run", "--duration", "20s", "--quiet",
                                      "/chaos-eater/sandbox/cycle_x/hypothesis/"
                                      "unittest_example-service-availability_mod0.js"}));
  EXPECT_TRUE(r.args.empty());
}

TEST(RunnerTest, RejectsZeroDurationAndEmptyPath) {
  EXPECT_THROW(RunnerCommand(PodProbe(), Duration()), ContractViolation);
  auto v = PodProbe();
  v.script_path.clear();
  EXPECT_THROW(RunnerCommand(v, Duration::Seconds(1)), ContractViolation);
}

TEST(RunnerTest, ParseInvertsRender) {
  for (const auto& vac : {PodProbe(), HttpProbe()}) {
    for (int s : {1, 5, 59, 600}) {
      auto r = RunnerCommand(vac, Duration::Seconds(s));
      Json c = {{"image", r.image}, {"command", r.command}};
      if (!r.args.empty()) c["args"] = r.args;
      auto p = ParseRunner(c);
      ASSERT_TRUE(p.has_value());
      EXPECT_EQ(p->tool, vac.tool);
      EXPECT_EQ(p->script_path, vac.script_path);
      EXPECT_EQ(p->duration.seconds(), s);
    }
  }
  EXPECT_FALSE(ParseRunner(Json{{"image", "busybox"}, {"command", {"sleep", "1"}}}).has_value());
}

TEST(ProbeScriptTest, PythonProbeIsDeterministicAndAsserts) {
  ThresholdSpec th{ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
  auto a = RenderProbeScript(PodProbe(), th);
  EXPECT_EQ(a, RenderProbeScript(PodProbe(), th));
  EXPECT_NE(a.find("assert running_percentage >= 90"), std::string::npos);
  EXPECT_NE(a.find("--duration"), std::string::npos);
  EXPECT_NE(a.find("class K8sAPIBase"), std::string::npos);
}

TEST(ProbeScriptTest, K6ProbeCarriesThreshold) {
  ThresholdSpec th{ThresholdMetric::kRequestFailureRate, Comparator::kAtMost, 0.001, ""};
  auto s = RenderProbeScript(HttpProbe(), th);
  EXPECT_NE(s.find("'http_req_failed': ['rate<=0.001']"), std::string::npos);
  EXPECT_NE(s.find("http.get('http://example-service.default.svc.cluster.local:80')"), std::string::npos);
}

TEST(ProbeScriptTest, MetricToolMismatchThrows) {
  ThresholdSpec th{ThresholdMetric::kRequestFailureRate, Comparator::kAtMost, 0.001, ""};
  EXPECT_THROW(RenderProbeScript(PodProbe(), th), ContractViolation);
}

TEST(ProbeScriptTest, PathEncodesVersionAndLanguage) {
  auto v = HttpProbe();
  v.version = 1;
  EXPECT_EQ(ProbeScriptPath("hypothesis", "svc", v), "hypothesis/unittest_svc_mod1.js");
  EXPECT_EQ(ProbeScriptPath("h/", "pod", PodProbe()), "h/unittest_pod_mod0.py");
}

TEST(EvaluateTest, AllRunningPasses) {
  ThresholdSpec th{ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
  auto o = EvaluateThreshold(th, Trace({1, 1, 1, 1, 1}), "pre-unittest-x");
  EXPECT_TRUE(o.passed);
  EXPECT_DOUBLE_EQ(o.measured, 1.0);
  EXPECT_EQ(o.name, "pre-unittest-x");
  EXPECT_NE(o.log.find("5 out of 5 seconds"), std::string::npos);
}

TEST(EvaluateTest, NeverRunningFails) {
  ThresholdSpec th{ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
  auto o = EvaluateThreshold(th, Trace(std::vector<double>(20, 0.0)));
  EXPECT_FALSE(o.passed);
  EXPECT_DOUBLE_EQ(o.measured, 0.0);
  EXPECT_NE(o.log.find("0 out of 20 seconds"), std::string::npos);
}

TEST(EvaluateTest, BoundaryRatioPasses) {
  ThresholdSpec th{ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
  auto o = EvaluateThreshold(th, Trace({1, 1, 1, 1, 1, 1, 1, 1, 1, 0}));
  EXPECT_TRUE(o.passed);
}

TEST(EvaluateTest, ReplicaMinimum) {
  ThresholdSpec th{ThresholdMetric::kReadyReplicasMin, Comparator::kAtLeast, 1, ""};
  EXPECT_TRUE(EvaluateThreshold(th, Trace({2, 1, 1})).passed);
  EXPECT_FALSE(EvaluateThreshold(th, Trace({2, 0, 1})).passed);
}

TEST(EvaluateTest, RejectsBadTraces) {
  ThresholdSpec th{ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
  EXPECT_THROW(EvaluateThreshold(th, Trace({})), ContractViolation);
  auto t = Trace({1, 1});
  t.samples[1].t = 0;
  EXPECT_THROW(EvaluateThreshold(th, t), ContractViolation);
}

}  // namespace
}  // namespace chaoscycle
