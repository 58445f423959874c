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

#include <algorithm>

#include "chaoscycle/domain.h"
#include "chaoscycle/error.h"

namespace chaoscycle {
namespace {

TEST(DurationTest, ParsesCompactForms) {
  EXPECT_EQ(ParseDuration("5m10s").seconds(), 310);
  EXPECT_EQ(ParseDuration("0s").seconds(), 0);
  EXPECT_EQ(ParseDuration("1h").seconds(), 3600);
  EXPECT_EQ(ParseDuration("30m51s").seconds(), 1851);
}

TEST(DurationTest, FormatsLargestUnitFirst) {
  EXPECT_EQ(FormatDuration(Duration::Seconds(1851)), "30m51s");
  EXPECT_EQ(FormatDuration(Duration()), "0s");
  EXPECT_EQ(FormatDuration(Duration::Seconds(3600)), "1h");
  EXPECT_EQ(FormatDuration(Duration::Seconds(3605)), "1h5s");
}

TEST(DurationTest, RejectsGarbage) {
  for (const char* bad : {"", "5", "m", "5x", "10s5m", "5m5m", "-5s", "5s "}) {
    EXPECT_THROW(ParseDuration(bad), ParseError) << bad;
  }
  try {
    ParseDuration("5q");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("'q'"), std::string::npos);
  }
}

TEST(DurationTest, RoundTripsEverySecondOfADay) {
  for (std::int64_t s = 0; s <= 24 * 3600; ++s) {
    const Duration d = Duration::Seconds(s);
    ASSERT_EQ(ParseDuration(FormatDuration(d)), d) << s;
  }
}

TEST(DurationTest, AdditionAndMaxAreAssociative) {
  const Duration a = Duration::Seconds(5), b = Duration::Seconds(70), c = Duration::Seconds(3601);
  EXPECT_EQ((a + b) + c, a + (b + c));
  EXPECT_EQ(Max(Max(a, b), c), Max(a, Max(b, c)));
  EXPECT_THROW(Duration(-1), ContractViolation);
}

TEST(IdentifierTest, AcceptsLowercaseHyphenated) {
  EXPECT_TRUE(IsValidIdentifier("example-pod-running"));
  EXPECT_TRUE(IsValidIdentifier("a1"));
  EXPECT_FALSE(IsValidIdentifier("Example"));
  EXPECT_FALSE(IsValidIdentifier("-lead"));
  EXPECT_FALSE(IsValidIdentifier("trail-"));
  EXPECT_FALSE(IsValidIdentifier("under_score"));
  EXPECT_FALSE(IsValidIdentifier(""));
}

TEST(ThresholdTest, BoundaryIsInclusive) {
  ThresholdSpec t{ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
  EXPECT_TRUE(t.Holds(0.9));
  EXPECT_FALSE(t.Holds(0.89));
  t.comparator = Comparator::kAtMost;
  EXPECT_TRUE(t.Holds(0.9));
  t.comparator = Comparator::kEqual;
  EXPECT_TRUE(t.Holds(0.9));
  EXPECT_FALSE(t.Holds(1.0));
}

TEST(ThresholdTest, ValidatesValueDomain) {
  EXPECT_TRUE((ThresholdSpec{ThresholdMetric::kReadyRatio, Comparator::kAtLeast, 1.0, ""}).Validate().empty());
  EXPECT_FALSE((ThresholdSpec{ThresholdMetric::kReadyRatio, Comparator::kAtLeast, 1.5, ""}).Validate().empty());
  EXPECT_TRUE((ThresholdSpec{ThresholdMetric::kReadyReplicasMin, Comparator::kAtLeast, 2, ""}).Validate().empty());
  EXPECT_FALSE((ThresholdSpec{ThresholdMetric::kReadyReplicasMin, Comparator::kAtLeast, 1.5, ""}).Validate().empty());
}

TEST(VaCSpecTest, InternalServiceUrls) {
  EXPECT_TRUE(IsInternalServiceUrl("http://example-service.default.svc.cluster.local:80"));
  EXPECT_TRUE(IsInternalServiceUrl("http://front-end.sock-shop.svc.cluster.local/catalogue?size=10"));
  EXPECT_TRUE(IsInternalServiceUrl("front-end.sock-shop.svc.cluster.local"));
  EXPECT_FALSE(IsInternalServiceUrl("http://localhost:8080"));
  EXPECT_FALSE(IsInternalServiceUrl("http://example-service:80"));
}

TEST(VaCSpecTest, ClusterApiNeedsOneKindAndOneTargetForm) {
  VaCSpec v;
  v.target.kind = "Pod";
  v.target.name = "example-pod";
  EXPECT_TRUE(v.Validate().empty());
  v.target.label_selector = {{"app", "example"}};
  EXPECT_FALSE(v.Validate().empty());
  v.target.name.clear();
  v.target.kind = "Pod,Deployment";
  EXPECT_FALSE(v.Validate().empty());
}

SteadyState PodRunning() {
  SteadyState s;
  s.name = "example-pod-running";
  s.threshold = {ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
  s.vac.target = {"default", "Pod", "example-pod", {}, ""};
  s.baseline = SampleTrace{s.name, {{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}}, Duration::Seconds(5)};
  return s;
}

FailureScenario PodKill() {
  Fault f;
  f.kind = FaultKind::kPodChaos;
  f.params = Json{{"action", "pod-kill"}, {"mode", "one"}};
  return FailureScenario{"e", "d", {{f}}};
}

TEST(HypothesisTest, AcceptsConsistentHypothesis) {
  const Hypothesis h = Hypothesis::Make({PodRunning()}, PodKill());
  ASSERT_NE(h.Find("example-pod-running"), nullptr);
  EXPECT_EQ(h.Find("nope"), nullptr);
}

TEST(HypothesisTest, RejectsFailingBaselineAndDuplicates) {
  SteadyState s = PodRunning();
  s.baseline->samples = {{0, 0}, {1, 1}};
  EXPECT_THROW(Hypothesis::Make({s}, PodKill()), ValidationError);
  EXPECT_THROW(Hypothesis::Make({PodRunning(), PodRunning()}, PodKill()), ValidationError);
  EXPECT_THROW(Hypothesis::Make({}, PodKill()), ValidationError);
  FailureScenario dup = PodKill();
  dup.sequence.push_back(dup.sequence.front());
  EXPECT_THROW(Hypothesis::Make({PodRunning()}, dup), ValidationError);
  SteadyState wrong_tool = PodRunning();
  wrong_tool.threshold.metric = ThresholdMetric::kRequestFailureRate;
  wrong_tool.threshold.comparator = Comparator::kAtMost;
  wrong_tool.baseline.reset();
  try {
    Hypothesis::Make({wrong_tool}, PodKill());
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_NE(e.violations()[0].find("cannot be measured"), std::string::npos);
  }
}

TEST(HypothesisTest, CapOnSteadyStates) {
  SteadyState a = PodRunning(), b = PodRunning(), c = PodRunning();
  b.name = "b";
  c.name = "c";
  EXPECT_NO_THROW(Hypothesis::Make({a, b}, PodKill()));
  EXPECT_THROW(Hypothesis::Make({a, b, c}, PodKill()), ValidationError);
  EXPECT_NO_THROW(Hypothesis::Make({a, b, c}, PodKill(), 3));
}

ExperimentResult NginxRuns(const std::vector<std::string>& failing) {
  ExperimentResult r;
  for (const char* stage : {"pre", "fault", "post"}) {
    for (const char* ss : {"example-pod-running", "example-service-availability"}) {
      const std::string name = std::string(stage) + "-unittest-" + ss;
      r.scheduled_runs.push_back(name);
      const bool fails = std::find(failing.begin(), failing.end(), name) != failing.end();
      r.outcomes.push_back({name, !fails, "", 0.0});
    }
  }
  return r;
}

TEST(HypothesisSatisfiedTest, MechanicalConjunction) {
  EXPECT_TRUE(HypothesisSatisfied(NginxRuns({})));
  EXPECT_FALSE(HypothesisSatisfied(NginxRuns({"fault-unittest-example-pod-running"})));
  EXPECT_TRUE(HypothesisSatisfied(ExperimentResult{}));
  ExperimentResult missing = NginxRuns({});
  missing.outcomes.pop_back();
  EXPECT_THROW(HypothesisSatisfied(missing), ContractViolation);
}

TEST(HypothesisSatisfiedTest, MonotoneUnderPassesAntiMonotoneUnderFailures) {
  ExperimentResult r = NginxRuns({});
  r.scheduled_runs.push_back("extra");
  r.outcomes.push_back({"extra", true, "", 0});
  EXPECT_TRUE(HypothesisSatisfied(r));
  r.scheduled_runs.push_back("extra-fail");
  r.outcomes.push_back({"extra-fail", false, "", 0});
  EXPECT_FALSE(HypothesisSatisfied(r));
}

TEST(AggregateTest, RatioAndCountMetrics) {
  SampleTrace t{"x", {{0, 1}, {1, 0}, {2, 2}, {3, 1}}, Duration::Seconds(4)};
  EXPECT_DOUBLE_EQ(AggregateTrace(ThresholdMetric::kRunningRatio, t), 0.75);
  EXPECT_DOUBLE_EQ(AggregateTrace(ThresholdMetric::kReadyReplicasMin, t), 0.0);
  SampleTrace f{"y", {{0, 0}, {1, 0.5}, {2, 0}, {3, 0.5}}, Duration::Seconds(4)};
  EXPECT_DOUBLE_EQ(AggregateTrace(ThresholdMetric::kRequestFailureRate, f), 0.25);
  EXPECT_THROW(AggregateTrace(ThresholdMetric::kRunningRatio, SampleTrace{}), ContractViolation);
}

TEST(JsonTest, HypothesisRoundTrips) {
  const Hypothesis h = Hypothesis::Make({PodRunning()}, PodKill());
  const Json j = h;
  const Hypothesis back = j.get<Hypothesis>();
  EXPECT_EQ(Json(back), j);
  EXPECT_EQ(j["steady_states"][0]["threshold"]["metric"], "running-ratio");
  EXPECT_EQ(j["steady_states"][0]["vac"]["sample_interval"], "1s");
  EXPECT_EQ(j["scenario"]["sequence"][0][0]["kind"], "PodChaos");
}

TEST(SelectorTest, JsonRoundTrip) {
  const Json j = Json::parse(R"({"namespaces":["default"],"labelSelectors":{"app":"example"},
      "expressionSelectors":[{"key":"tier","operator":"In","values":["web"]}],
      "podPhaseSelectors":["Running"],"pods":{"default":["a","b"]}})");
  const SelectorSpec s = SelectorSpec::FromJson(j);
  EXPECT_EQ(s.label_selectors.at("app"), "example");
  EXPECT_EQ(SelectorSpec::FromJson(s.ToJson()), s);
  EXPECT_TRUE(SelectorSpec{}.empty());
  EXPECT_FALSE(s.empty());
}

}  // namespace
}  // namespace chaoscycle
