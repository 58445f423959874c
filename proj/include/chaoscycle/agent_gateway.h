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

// Prompt templates, structured outputs, verification loops and cost ledger.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chaoscycle/domain.h"
#include "chaoscycle/error.h"

namespace chaoscycle {

struct ChatMessage {
  std::string role;  // system, user, assistant
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// ---------------------------------------------------------------------------
// Prompt templates

// Ids of the shipped templates: 0-0 .. 0-3, 1-0 .. 1-6 (1-3-a, 1-3-b),
// 2-0 .. 2-4, 3-0, 4-0, EX.
const std::vector<std::string>& AgentIds();

struct PromptTemplate {
  std::string id;
  std::vector<std::pair<std::string, std::string>> roles;  // (role, text)
  std::set<std::string> placeholders;                      // {{name}}
  std::set<std::string> dynamic_slots;                     // {{@name}}

  // Parses the "@@ role" sectioned template format.
  static PromptTemplate Parse(std::string id, std::string_view text);
};

// Throws ConfigError for an unknown id.
const PromptTemplate& GetTemplate(std::string_view id);

struct PromptBindings {
  std::map<std::string, std::string> values;
  // Dynamic slot -> condition (e.g. detailed_param_instructions -> PodChaos).
  std::map<std::string, std::string> conditions;
};

// Text of a dynamic slot for a condition. Throws ContractViolation for an
// unknown slot or condition.
std::string DynamicBlock(std::string_view slot, std::string_view condition);

// Verbatim substitution. "format_instructions" is bound from the agent's
// output schema when not given. Throws ContractViolation naming the first
// unbound placeholder or unresolvable slot.
std::vector<ChatMessage> RenderPrompt(const PromptTemplate& tmpl, const PromptBindings& bindings);

// ---------------------------------------------------------------------------
// Structured outputs

enum class FieldKind { kString, kInteger, kNumber, kBoolean, kObject, kArray, kAny };

struct OutputField {
  std::string name;
  FieldKind kind = FieldKind::kString;
  bool required = true;
  std::vector<std::string> allowed;   // enumeration for strings
  std::vector<OutputField> fields;    // object members, or array item members
  FieldKind item_kind = FieldKind::kObject;  // arrays
  std::string description;
};

struct OutputSchema {
  std::vector<OutputField> fields;

  // Throws ContractViolation for an empty schema.
  const std::string& first_field() const;
  Json ToJsonSchema() const;
};

// Schema of an agent's reply. 1-6 depends on the fault kind.
// The id may carry a condition: "1-6:PodChaos", "2-1:fault-injection".
OutputSchema SchemaForAgent(std::string_view id);
OutputSchema FaultParamOutputSchema(FaultKind kind);

// {"<first_field>":
std::string PrefillFor(const OutputSchema& schema);

// Field-level checks; messages read like "missing field threshold".
std::vector<std::string> CheckAgainstSchema(const Json& value, const OutputSchema& schema);

// Strips code fences, restores the prefill when the text starts mid-object,
// decodes and checks. Throws ParseError carrying every problem found.
Json ParseStructuredOutput(std::string_view text, const OutputSchema& schema);

// ---------------------------------------------------------------------------
// Verification loop

struct Attempt {
  std::string output;
  std::string error;  // empty when the attempt verified
};

template <typename T>
struct LoopOutcome {
  std::optional<T> value;
  std::vector<Attempt> transcript;

  bool exhausted() const { return !value.has_value(); }
  int attempts() const { return static_cast<int>(transcript.size()); }
};

// Runs step(history) until verify returns no errors, at most max_retries
// times. A step that throws Error counts as a failed attempt.
template <typename T>
LoopOutcome<T> VerificationLoop(const std::function<T(const std::vector<Attempt>&)>& step,
                                const std::function<std::vector<std::string>(const T&)>& verify,
                                const std::function<std::string(const T&)>& show, int max_retries) {
  if (max_retries < 1) throw ContractViolation("max_retries must be at least 1");
  LoopOutcome<T> out;
  for (int i = 0; i < max_retries; ++i) {
    std::optional<T> candidate;
    Attempt a;
    try {
      candidate = step(out.transcript);
      a.output = show(*candidate);
      auto errors = verify(*candidate);
      for (const auto& e : errors) a.error += (a.error.empty() ? "" : "\n") + e;
    } catch (const Error& e) {
      a.error = e.what();
    }
    const bool ok = candidate && a.error.empty();
    out.transcript.push_back(std::move(a));
    if (ok) {
      out.value = std::move(candidate);
      break;
    }
  }
  return out;
}

// Conversation for the next attempt: the initial messages followed by each
// failed output (assistant) and its error (user).
std::vector<ChatMessage> WithFeedback(std::vector<ChatMessage> initial, const std::vector<Attempt>& history);

// ---------------------------------------------------------------------------
// Cost ledger

// Money in picodollars (1e-12 USD) to keep the arithmetic exact.
using Picodollars = std::int64_t;

// "$0.21"; rounds half up to cents.
std::string FormatUsd(Picodollars amount);
// Price in USD per million tokens to picodollars per token.
Picodollars PricePerMillion(double usd);

struct PhaseUsage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double wall_seconds = 0.0;
  bool approximate = false;  // counted by whitespace splitting
};

class CostLedger {
 public:
  CostLedger(Picodollars price_in = PricePerMillion(2.50), Picodollars price_out = PricePerMillion(10.00))
      : price_in_(price_in), price_out_(price_out) {}
  CostLedger(const CostLedger& other);
  CostLedger& operator=(const CostLedger& other);

  // Throws ContractViolation on negative counts.
  void Record(const std::string& phase, std::int64_t input_tokens, std::int64_t output_tokens,
              bool approximate = false);
  void AddWallTime(const std::string& phase, double seconds);
  void Merge(const CostLedger& other);

  Picodollars Cost(const std::string& phase) const;
  Picodollars TotalCost() const;
  PhaseUsage Total() const;
  std::vector<std::string> phases() const;
  PhaseUsage usage(const std::string& phase) const;

  Json ToJson() const;

 private:
  Picodollars price_in_;
  Picodollars price_out_;
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, PhaseUsage>> rows_;
};

// Whitespace token count used when no provider usage is available.
std::int64_t ApproximateTokens(std::string_view text);

}  // namespace chaoscycle
