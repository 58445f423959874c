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

// Chat-completion client with bounded retries and usage accounting.
#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "chaoscycle/agent_gateway.h"

namespace chaoscycle {

struct HttpRequest {
  std::string url;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;  // 0 means the connection itself failed
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse Post(const HttpRequest& request) = 0;
};

class HttplibTransport : public Transport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(120)) : timeout_(timeout) {}
  HttpResponse Post(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

// Replays scripted responses and records every request.
class FakeTransport : public Transport {
 public:
  void Push(HttpResponse response);
  HttpResponse Post(const HttpRequest& request) override;
  std::vector<HttpRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::deque<HttpResponse> queue_;
  std::vector<HttpRequest> requests_;
};

struct LlmConfig {
  std::string endpoint = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-4o-2024-08-06";

  // CHAOSCYCLE_LLM_ENDPOINT, CHAOSCYCLE_LLM_API_KEY (or OPENAI_API_KEY),
  // CHAOSCYCLE_LLM_MODEL. Throws ConfigError when no key is set.
  static LlmConfig FromEnv();
};

struct ChatParams {
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

struct ChatResult {
  std::string text;  // continuation after the prefill, as returned
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  int attempts = 0;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleeping the thread
};

class ChatClient {
 public:
  ChatClient(LlmConfig config, std::shared_ptr<Transport> transport, CostLedger* ledger = nullptr,
             RetryPolicy retry = {});

  // Retries connection failures, 429 and 5xx. Throws BackendError when the
  // attempts run out or on any other status.
  ChatResult Complete(const std::vector<ChatMessage>& messages, const OutputSchema& schema, const ChatParams& params,
                      const std::string& phase);

  Json RequestBody(const std::vector<ChatMessage>& messages, const OutputSchema& schema,
                   const ChatParams& params) const;

 private:
  LlmConfig config_;
  std::shared_ptr<Transport> transport_;
  CostLedger* ledger_;
  RetryPolicy retry_;
};

}  // namespace chaoscycle
