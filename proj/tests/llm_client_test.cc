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

#include "chaoscycle/llm_client.h"

#include <gtest/gtest.h>

#include <cstdlib>

namespace chaoscycle {
namespace {

HttpResponse Completion(const std::string& content, int in = 120, int out = 30) {
  Json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
               {"usage", {{"prompt_tokens", in}, {"completion_tokens", out}}}};
  return {200, body.dump()};
}

LlmConfig TestConfig() {
  LlmConfig c;
  c.endpoint = "http://llm.invalid/v1/";
  c.api_key = "k";
  c.model = "m";
  return c;
}

struct Fixture {
  std::shared_ptr<FakeTransport> transport = std::make_shared<FakeTransport>();
  std::vector<std::chrono::milliseconds> sleeps;
  CostLedger ledger;

  ChatClient Client(int max_attempts = 5) {
    RetryPolicy r;
    r.max_attempts = max_attempts;
    r.sleep = [this](std::chrono::milliseconds d) { sleeps.push_back(d); };
    return ChatClient(TestConfig(), transport, &ledger, r);
  }
};

TEST(ChatClientTest, LoopbackParsesCannedFixture) {
  Fixture f;
  f.transport->Push(Completion(" \"a three-replica nginx deployment\"}"));
  auto client = f.Client();
  const OutputSchema s = SchemaForAgent("0-0");
  auto r = client.Complete({{"system", "sys"}, {"user", "u"}}, s, {0.0, 42}, "preprocess");
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(ParseStructuredOutput(r.text, s)["k8s_summary"], "a three-replica nginx deployment");

  const auto reqs = f.transport->requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].url, "http://llm.invalid/v1/chat/completions");
  EXPECT_EQ(reqs[0].headers.at("Authorization"), "Bearer k");
  const Json body = Json::parse(reqs[0].body);
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["seed"], 42);
  EXPECT_EQ(body["messages"].back()["role"], "assistant");
  EXPECT_EQ(body["messages"].back()["content"], "{\"k8s_summary\":");

  EXPECT_EQ(f.ledger.usage("preprocess").input_tokens, 120);
  EXPECT_EQ(f.ledger.usage("preprocess").output_tokens, 30);
  EXPECT_FALSE(f.ledger.usage("preprocess").approximate);
}

TEST(ChatClientTest, RetriesRateLimits) {
  Fixture f;
  f.transport->Push({429, "slow down"});
  f.transport->Push({429, "slow down"});
  f.transport->Push(Completion("{\"summary\": \"ok\"}"));
  auto client = f.Client();
  auto r = client.Complete({{"user", "u"}}, SchemaForAgent("EX"), {}, "post");
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(f.transport->requests().size(), 3u);
  ASSERT_EQ(f.sleeps.size(), 2u);
  EXPECT_LT(f.sleeps[0], f.sleeps[1]);
}

TEST(ChatClientTest, BoundedRetries) {
  Fixture f;
  for (int i = 0; i < 10; ++i) f.transport->Push({503, ""});
  auto client = f.Client(3);
  EXPECT_THROW(client.Complete({{"user", "u"}}, SchemaForAgent("EX"), {}, "p"), BackendError);
  EXPECT_EQ(f.transport->requests().size(), 3u);
  EXPECT_TRUE(f.ledger.phases().empty());
}

TEST(ChatClientTest, ClientErrorsAreNotRetried) {
  Fixture f;
  f.transport->Push({400, "bad request"});
  auto client = f.Client();
  EXPECT_THROW(client.Complete({{"user", "u"}}, SchemaForAgent("EX"), {}, "p"), BackendError);
  EXPECT_EQ(f.transport->requests().size(), 1u);
}

TEST(LlmConfigTest, MissingCredentialFailsBeforeAnyCall) {
  ::unsetenv("CHAOSCYCLE_LLM_API_KEY");
  ::unsetenv("OPENAI_API_KEY");
  EXPECT_THROW(LlmConfig::FromEnv(), ConfigError);
  auto transport = std::make_shared<FakeTransport>();
  LlmConfig c = TestConfig();
  c.api_key.clear();
  EXPECT_THROW(ChatClient(c, transport), ConfigError);
  EXPECT_TRUE(transport->requests().empty());

  ::setenv("CHAOSCYCLE_LLM_API_KEY", "abc", 1);
  ::setenv("CHAOSCYCLE_LLM_MODEL", "other", 1);
  const LlmConfig from_env = LlmConfig::FromEnv();
  EXPECT_EQ(from_env.api_key, "abc");
  EXPECT_EQ(from_env.model, "other");
  ::unsetenv("CHAOSCYCLE_LLM_API_KEY");
  ::unsetenv("CHAOSCYCLE_LLM_MODEL");
}

}  // namespace
}  // namespace chaoscycle
