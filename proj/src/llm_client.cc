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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "chaoscycle/llm_client.h"

#include <httplib.h>

#include <cstdlib>
#include <regex>
#include <thread>

namespace chaoscycle {

namespace {

std::string Env(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

bool Retryable(int status) { return status == 0 || status == 429 || status >= 500; }

}  // namespace

HttpResponse HttplibTransport::Post(const HttpRequest& request) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(request.url, m, kUrl)) throw ConfigError("malformed endpoint url '" + request.url + "'");
  httplib::Client cli(m[1].str());
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (k == "Content-Type") {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }
  const std::string path = m[2].matched ? m[2].str() : "/";
  auto res = cli.Post(path, headers, request.body, content_type);
  if (!res) return {0, httplib::to_string(res.error())};
  return {res->status, res->body};
}

void FakeTransport::Push(HttpResponse response) {
  std::lock_guard<std::mutex> lock(mu_);
  queue_.push_back(std::move(response));
}

HttpResponse FakeTransport::Post(const HttpRequest& request) {
  std::lock_guard<std::mutex> lock(mu_);
  requests_.push_back(request);
  if (queue_.empty()) return {0, "no scripted response"};
  HttpResponse r = std::move(queue_.front());
  queue_.pop_front();
  return r;
}

std::vector<HttpRequest> FakeTransport::requests() const {
  std::lock_guard<std::mutex> lock(mu_);
  return requests_;
}

LlmConfig LlmConfig::FromEnv() {
  LlmConfig c;
  if (auto e = Env("CHAOSCYCLE_LLM_ENDPOINT"); !e.empty()) c.endpoint = e;
  if (auto m = Env("CHAOSCYCLE_LLM_MODEL"); !m.empty()) c.model = m;
  c.api_key = Env("CHAOSCYCLE_LLM_API_KEY");
  if (c.api_key.empty()) c.api_key = Env("OPENAI_API_KEY");
  if (c.api_key.empty()) {
    throw ConfigError("no LLM credential: set CHAOSCYCLE_LLM_API_KEY or OPENAI_API_KEY");
  }
  return c;
}

ChatClient::ChatClient(LlmConfig config, std::shared_ptr<Transport> transport, CostLedger* ledger, RetryPolicy retry)
    : config_(std::move(config)), transport_(std::move(transport)), ledger_(ledger), retry_(std::move(retry)) {
  if (config_.api_key.empty()) throw ConfigError("no LLM credential configured");
  if (!transport_) throw ContractViolation("chat client needs a transport");
  if (retry_.max_attempts < 1) throw ContractViolation("max_attempts must be at least 1");
  if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Json ChatClient::RequestBody(const std::vector<ChatMessage>& messages, const OutputSchema& schema,
                             const ChatParams& params) const {
  Json msgs = Json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  msgs.push_back({{"role", "assistant"}, {"content", PrefillFor(schema)}});
  Json body = {{"model", config_.model}, {"messages", msgs}, {"temperature", params.temperature}};
  if (params.seed) body["seed"] = *params.seed;
  return body;
}

ChatResult ChatClient::Complete(const std::vector<ChatMessage>& messages, const OutputSchema& schema,
                                const ChatParams& params, const std::string& phase) {
  std::string endpoint = config_.endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  HttpRequest req;
  req.url = endpoint + "/chat/completions";
  req.headers = {{"Authorization", "Bearer " + config_.api_key}, {"Content-Type", "application/json"}};
  req.body = RequestBody(messages, schema, params).dump();

  const auto start = std::chrono::steady_clock::now();
  auto backoff = retry_.initial_backoff;
  ChatResult out;
  HttpResponse res;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    out.attempts = attempt;
    res = transport_->Post(req);
    if (res.status == 200) break;
    if (!Retryable(res.status)) {
      throw BackendError("chat completion failed with HTTP " + std::to_string(res.status) + ": " +
                         res.body.substr(0, 500));
    }
    if (attempt == retry_.max_attempts) {
      throw BackendError("chat completion gave up after " + std::to_string(attempt) + " attempts (last status " +
                         std::to_string(res.status) + ")");
    }
    retry_.sleep(backoff);
    backoff = std::min(backoff * 2, retry_.max_backoff);
  }

  const Json j = Json::parse(res.body, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
    throw BackendError("chat completion returned an unreadable body");
  }
  const Json& msg = j["choices"][0]["message"];
  out.text = msg.value("content", "");
  if (j.contains("usage")) {
    out.input_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    out.output_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
  }
  if (ledger_) {
    ledger_->Record(phase, out.input_tokens, out.output_tokens);
    ledger_->AddWallTime(phase, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return out;
}

}  // namespace chaoscycle
