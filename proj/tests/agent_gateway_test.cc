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

#include "chaoscycle/agent_gateway.h"

#include <gtest/gtest.h>

#include <thread>

#include "chaoscycle/fault_catalog.h"
#include "golden_plans.h"

namespace chaoscycle {
namespace {

bool Contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(PromptTemplateTest, AllAgentsShipTemplates) {
  EXPECT_EQ(AgentIds().size(), 20u);
  for (const auto& id : AgentIds()) {
    const PromptTemplate& t = GetTemplate(id);
    EXPECT_EQ(t.id, id);
    ASSERT_FALSE(t.roles.empty()) << id;
    EXPECT_EQ(t.roles.front().first, "system") << id;
    EXPECT_TRUE(t.placeholders.count("format_instructions")) << id;
    EXPECT_NO_THROW(SchemaForAgent(id == "1-6" ? "1-6:PodChaos" : id)) << id;
  }
  EXPECT_THROW(GetTemplate("9-9"), ConfigError);
}

TEST(PromptTemplateTest, ParseCollectsPlaceholdersAndSlots) {
  auto t = PromptTemplate::Parse("x", "@@ system\nhello {{a}} {{@slot}}\n@@ user\n{{b}} and {{a}}\n");
  ASSERT_EQ(t.roles.size(), 2u);
  EXPECT_EQ(t.placeholders, (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(t.dynamic_slots, (std::set<std::string>{"slot"}));
  EXPECT_THROW(PromptTemplate::Parse("x", "@@ robot\nhi\n"), ConfigError);
  EXPECT_THROW(PromptTemplate::Parse("x", "stray\n@@ user\nhi\n"), ConfigError);
}

TEST(RenderPromptTest, ZeroPlaceholdersIsIdentity) {
  auto t = PromptTemplate::Parse("x", "@@ system\nplain text\n@@ user\nmore {text}\n");
  auto msgs = RenderPrompt(t, {});
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0], (ChatMessage{"system", "plain text"}));
  EXPECT_EQ(msgs[1], (ChatMessage{"user", "more {text}"}));
}

TEST(RenderPromptTest, VerbatimSubstitution) {
  auto t = PromptTemplate::Parse("x", "@@ user\n[{{a}}] [{{a}}]\n");
  PromptBindings b;
  b.values["a"] = "{{b}} \"quoted\" \\ <tag>";
  auto msgs = RenderPrompt(t, b);
  EXPECT_EQ(msgs[0].content, "[{{b}} \"quoted\" \\ <tag>] [{{b}} \"quoted\" \\ <tag>]");
  EXPECT_EQ(RenderPrompt(t, b), msgs);
}

TEST(RenderPromptTest, MissingBindingIsNamed) {
  PromptBindings b;
  b.values = {{"system_overview", "o"}, {"steady_states", "s"}, {"fault_scenario", "f"}, {"fault_kind", "PodChaos"},
              {"fault_name_id", "0"}, {"fault_scope", "x"}};
  b.conditions["detailed_param_instructions"] = "PodChaos";
  try {
    RenderPrompt(GetTemplate("1-6"), b);
    FAIL() << "expected an error";
  } catch (const ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("ce_instructions"), std::string::npos) << e.what();
  }
}

TEST(RenderPromptTest, DynamicFaultBlock) {
  PromptBindings b;
  b.values = {{"system_overview", "o"}, {"steady_states", "s"}, {"fault_scenario", "f"}, {"fault_kind", "PodChaos"},
              {"fault_name_id", "0"}, {"fault_scope", "x"},     {"ce_instructions", "c"}};
  b.conditions["detailed_param_instructions"] = "PodChaos";
  auto msgs = RenderPrompt(GetTemplate("1-6"), b);
  const std::string& sys = msgs[0].content;
  EXPECT_NE(sys.find(DynamicBlock("detailed_param_instructions", "PodChaos")), std::string::npos);
  EXPECT_NE(sys.find("pod-kill"), std::string::npos);
  EXPECT_NE(sys.find("container-kill"), std::string::npos);
  EXPECT_EQ(sys.find("{{"), std::string::npos);
  EXPECT_NE(sys.find("\"action\""), std::string::npos);

  b.conditions["detailed_param_instructions"] = "KernelChaos";
  EXPECT_THROW(RenderPrompt(GetTemplate("1-6"), b), ContractViolation);
  b.conditions.clear();
  EXPECT_THROW(RenderPrompt(GetTemplate("1-6"), b), ContractViolation);
}

TEST(PrefillTest, FirstFieldRule) {
  EXPECT_EQ(PrefillFor(SchemaForAgent("0-0")), "{\"k8s_summary\":");
  EXPECT_EQ(PrefillFor(SchemaForAgent("1-0")), "{\"thought\":");
  EXPECT_THROW(PrefillFor(OutputSchema{}), ContractViolation);
}

TEST(ParseStructuredOutputTest, SingleFieldRoundTripThroughPrefill) {
  const OutputSchema s = SchemaForAgent("0-0");
  const Json value = {{"k8s_summary", "one nginx pod"}};
  const std::string full = value.dump();
  const std::string continuation = full.substr(PrefillFor(s).size());
  EXPECT_EQ(ParseStructuredOutput(continuation, s), value);
  EXPECT_EQ(ParseStructuredOutput(full, s), value);
}

TEST(ParseStructuredOutputTest, FencedObject) {
  const OutputSchema s = SchemaForAgent("1-0");
  const Json v = ParseStructuredOutput(
      "```json\n{\"thought\": \"t\", \"manifest\": \"nginx/pod.yaml\", \"name\": \"example-pod-running\"}\n```", s);
  EXPECT_EQ(v["name"], "example-pod-running");
}

TEST(ParseStructuredOutputTest, MissingThreshold) {
  const OutputSchema s = SchemaForAgent("1-2");
  Json good = {{"thought", "t"},
               {"threshold", {{"metric", "running-ratio"}, {"comparator", ">="}, {"value", 0.9}, {"description", "d"}}}};
  EXPECT_NO_THROW(ParseStructuredOutput(good.dump(), s));
  Json bad = good;
  bad.erase("threshold");
  EXPECT_EQ(CheckAgainstSchema(bad, s), std::vector<std::string>{"missing field threshold"});
  try {
    ParseStructuredOutput(bad.dump(), s);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_STREQ(e.what(), "missing field threshold");
  }
}

TEST(ParseStructuredOutputTest, PodChaosModeEnum) {
  const OutputSchema s = SchemaForAgent("1-6:PodChaos");
  Json params = testing::NginxPodKill().params;
  EXPECT_TRUE(CheckAgainstSchema(params, s).empty()) << params.dump();
  params["mode"] = "sometimes";
  const auto errors = CheckAgainstSchema(params, s);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_TRUE(Contains(errors, "field mode: 'sometimes' is not one of [")) << errors[0];
  EXPECT_TRUE(Contains(errors, "fixed-percent"));
}

TEST(ParseStructuredOutputTest, DecodeAndTypeErrors) {
  const OutputSchema s = SchemaForAgent("1-4");
  EXPECT_THROW(ParseStructuredOutput("", s), ParseError);
  EXPECT_THROW(ParseStructuredOutput("{not json", s), ParseError);
  auto errs = CheckAgainstSchema(Json{{"thought", "t"}, {"requires_addition", "yes"}}, s);
  EXPECT_TRUE(Contains(errs, "field requires_addition: expected boolean"));
  // Trailing prose around the object.
  EXPECT_NO_THROW(ParseStructuredOutput("Sure: {\"thought\":\"t\",\"requires_addition\":false} done", s));
}

TEST(ParseStructuredOutputTest, NestedArrays) {
  const OutputSchema s = SchemaForAgent("1-5");
  Json v = {{"event", "e"},
            {"thought", "t"},
            {"faults", {{{{"name", "PodChaos"}, {"name_id", 0}, {"scope", "pod"}}},
                        {{{"name", "KernelChaos"}, {"name_id", 0}, {"scope", "pod"}}}}}};
  auto errs = CheckAgainstSchema(v, s);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_TRUE(Contains(errs, "faults[1][0].name: 'KernelChaos'"));
}

TEST(SchemaTest, ConditionalSchemas) {
  EXPECT_EQ(SchemaForAgent("2-1:fault-injection").fields.size(), 3u);
  EXPECT_EQ(SchemaForAgent("2-1:pre-validation").fields.size(), 2u);
  EXPECT_THROW(SchemaForAgent("1-6"), ContractViolation);
  EXPECT_THROW(SchemaForAgent("nope"), ConfigError);
  const Json js = SchemaForAgent("1-2").ToJsonSchema();
  EXPECT_EQ(js["type"], "object");
  EXPECT_EQ(js["properties"]["threshold"]["properties"]["comparator"]["enum"].size(), 3u);
}

TEST(SchemaTest, EveryCatalogKindHasParamSchema) {
  for (FaultKind k : kAllFaultKinds) {
    const OutputSchema s = FaultParamOutputSchema(k);
    ASSERT_FALSE(s.fields.empty());
    EXPECT_TRUE(s.fields.front().required) << FaultKindName(k);
  }
}

std::function<int(const std::vector<Attempt>&)> Scripted(std::vector<int> outputs, int* calls) {
  return [outputs, calls](const std::vector<Attempt>& history) {
    EXPECT_EQ(static_cast<int>(history.size()), *calls);
    return outputs.at((*calls)++);
  };
}

std::vector<std::string> PositiveOnly(const int& v) {
  if (v > 0) return {};
  return {"value " + std::to_string(v) + " must be positive"};
}

std::string Show(const int& v) { return std::to_string(v); }

TEST(VerificationLoopTest, FirstAttemptVerifies) {
  int calls = 0;
  auto out = VerificationLoop<int>(Scripted({5}, &calls), PositiveOnly, Show, 3);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(out.attempts(), 1);
  EXPECT_EQ(*out.value, 5);
}

TEST(VerificationLoopTest, FailTwiceThenSucceed) {
  int calls = 0;
  auto out = VerificationLoop<int>(Scripted({-1, 0, 7}, &calls), PositiveOnly, Show, 3);
  EXPECT_EQ(calls, 3);
  ASSERT_FALSE(out.exhausted());
  EXPECT_EQ(*out.value, 7);
  ASSERT_EQ(out.attempts(), 3);
  EXPECT_EQ(out.transcript[0].output, "-1");
  EXPECT_EQ(out.transcript[1].error, "value 0 must be positive");
  EXPECT_TRUE(out.transcript[2].error.empty());
}

TEST(VerificationLoopTest, AlwaysFailingExhaustsAfterExactlyMax) {
  int calls = 0;
  auto out = VerificationLoop<int>(Scripted({-1, -2, -3, -4, -5}, &calls), PositiveOnly, Show, 3);
  EXPECT_TRUE(out.exhausted());
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(out.attempts(), 3);
  EXPECT_THROW(VerificationLoop<int>(Scripted({1}, &calls), PositiveOnly, Show, 0), ContractViolation);
}

TEST(VerificationLoopTest, ThrownErrorCountsAsAttempt) {
  int calls = 0;
  auto out = VerificationLoop<int>(
      [&](const std::vector<Attempt>&) -> int {
        if (calls++ == 0) throw ParseError("output is not valid JSON");
        return 2;
      },
      PositiveOnly, Show, 3);
  EXPECT_EQ(out.attempts(), 2);
  EXPECT_EQ(out.transcript[0].error, "output is not valid JSON");
}

TEST(WithFeedbackTest, AppendsRejectedOutputs) {
  std::vector<ChatMessage> base = {{"system", "s"}, {"user", "u"}};
  auto msgs = WithFeedback(base, {{"bad", "missing field name"}, {"ok", ""}});
  ASSERT_EQ(msgs.size(), 4u);
  EXPECT_EQ(msgs[2], (ChatMessage{"assistant", "bad"}));
  EXPECT_NE(msgs[3].content.find("missing field name"), std::string::npos);
}

TEST(CostLedgerTest, PublishedTotals) {
  CostLedger a;
  a.Record("all", 59'000, 5'900);
  EXPECT_EQ(a.TotalCost(), 206'500'000'000);
  EXPECT_EQ(FormatUsd(a.TotalCost()), "$0.21");
  CostLedger b;
  b.Record("all", 284'000, 13'000);
  EXPECT_EQ(FormatUsd(b.TotalCost()), "$0.84");
  EXPECT_EQ(FormatUsd(CostLedger().TotalCost()), "$0.00");
  EXPECT_THROW(a.Record("x", -1, 0), ContractViolation);
}

TEST(CostLedgerTest, AdditivityAndPhases) {
  CostLedger a, b;
  a.Record("hypothesis", 1000, 10);
  a.Record("experiment", 2000, 20, true);
  b.Record("hypothesis", 3000, 30);
  b.AddWallTime("analysis", 1.5);
  CostLedger m = a;
  m.Merge(b);
  EXPECT_EQ(m.TotalCost(), a.TotalCost() + b.TotalCost());
  EXPECT_EQ(m.phases(), (std::vector<std::string>{"hypothesis", "experiment", "analysis"}));
  EXPECT_EQ(m.usage("hypothesis").input_tokens, 4000);
  EXPECT_TRUE(m.Total().approximate);
  const Json j = m.ToJson();
  EXPECT_EQ(j["phases"].size(), 3u);
  EXPECT_EQ(j["total"]["input_tokens"], 6000);
  EXPECT_DOUBLE_EQ(j["total"]["wall_seconds"].get<double>(), 1.5);
}

TEST(CostLedgerTest, ConcurrentRecording) {
  CostLedger l;
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i) {
    ts.emplace_back([&l] {
      for (int k = 0; k < 1000; ++k) l.Record("p", 1, 1);
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(l.Total().input_tokens, 8000);
}

TEST(CostLedgerTest, RoundingHalfUp) {
  EXPECT_EQ(FormatUsd(5'000'000'000), "$0.01");
  EXPECT_EQ(FormatUsd(4'999'999'999), "$0.00");
  EXPECT_EQ(FormatUsd(123'400'000'000'000), "$123.40");
}

TEST(ApproximateTokensTest, WhitespaceSplit) {
  EXPECT_EQ(ApproximateTokens(""), 0);
  EXPECT_EQ(ApproximateTokens("  a bb\n\tccc  "), 3);
}

}  // namespace
}  // namespace chaoscycle
