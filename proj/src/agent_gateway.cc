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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaoscycle/fault_catalog.h"
#include "prompt_data.h"

namespace chaoscycle {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

OutputField Str(std::string name, std::string description = "", std::vector<std::string> allowed = {},
                bool required = true) {
  OutputField f;
  f.name = std::move(name);
  f.kind = FieldKind::kString;
  f.description = std::move(description);
  f.allowed = std::move(allowed);
  f.required = required;
  return f;
}

OutputField Typed(std::string name, FieldKind kind, std::string description = "", bool required = true) {
  OutputField f;
  f.name = std::move(name);
  f.kind = kind;
  f.description = std::move(description);
  f.required = required;
  return f;
}

OutputField Obj(std::string name, std::vector<OutputField> members, std::string description = "",
                bool required = true) {
  OutputField f = Typed(std::move(name), FieldKind::kObject, std::move(description), required);
  f.fields = std::move(members);
  return f;
}

OutputField Arr(std::string name, OutputField item, std::string description = "", bool required = true) {
  OutputField f = Typed(std::move(name), FieldKind::kArray, std::move(description), required);
  f.item_kind = item.kind;
  f.fields = {std::move(item)};
  return f;
}

std::vector<std::string> KindNames() {
  std::vector<std::string> out;
  for (FaultKind k : kAllFaultKinds) out.emplace_back(FaultKindName(k));
  return out;
}

const std::vector<std::string> kMetricNames = {"ready-ratio", "running-ratio", "request-failure-rate",
                                               "ready-replicas-min"};

OutputField FromCatalog(const FieldSpec& spec) {
  OutputField f;
  f.name = spec.name;
  f.required = spec.required;
  f.allowed = spec.allowed;
  switch (spec.type) {
    case FieldType::kString:
      f.kind = FieldKind::kString;
      break;
    case FieldType::kNumericString:
      f.kind = FieldKind::kAny;
      f.description = "number written as a string";
      break;
    case FieldType::kInt:
      f.kind = FieldKind::kInteger;
      break;
    case FieldType::kBool:
      f.kind = FieldKind::kBoolean;
      break;
    case FieldType::kStringList:
      f = Arr(spec.name, Str("item"), "", spec.required);
      break;
    case FieldType::kStringListList:
      f = Arr(spec.name, Arr("item", Str("item")), "", spec.required);
      break;
    case FieldType::kStringMap:
    case FieldType::kSelector:
    case FieldType::kPodSelector:
      f.kind = FieldKind::kObject;
      break;
    case FieldType::kObject:
      f.kind = FieldKind::kObject;
      for (const auto& m : spec.fields) f.fields.push_back(FromCatalog(m));
      break;
  }
  return f;
}

std::string_view KindName(FieldKind k) {
  switch (k) {
    case FieldKind::kString:
      return "string";
    case FieldKind::kInteger:
      return "integer";
    case FieldKind::kNumber:
      return "number";
    case FieldKind::kBoolean:
      return "boolean";
    case FieldKind::kObject:
      return "object";
    case FieldKind::kArray:
      return "array";
    case FieldKind::kAny:
      return "any";
  }
  return "any";
}

Json FieldSchema(const OutputField& f) {
  Json j = Json::object();
  if (f.kind != FieldKind::kAny) j["type"] = std::string(KindName(f.kind));
  if (!f.description.empty()) j["description"] = f.description;
  if (!f.allowed.empty()) j["enum"] = f.allowed;
  if (f.kind == FieldKind::kObject && !f.fields.empty()) {
    Json props = Json::object();
    Json req = Json::array();
    for (const auto& m : f.fields) {
      props[m.name] = FieldSchema(m);
      if (m.required) req.push_back(m.name);
    }
    j["properties"] = props;
    j["required"] = req;
  }
  if (f.kind == FieldKind::kArray && !f.fields.empty()) j["items"] = FieldSchema(f.fields.front());
  return j;
}

bool KindMatches(FieldKind k, const Json& v) {
  switch (k) {
    case FieldKind::kString:
      return v.is_string();
    case FieldKind::kInteger:
      return v.is_number_integer();
    case FieldKind::kNumber:
      return v.is_number();
    case FieldKind::kBoolean:
      return v.is_boolean();
    case FieldKind::kObject:
      return v.is_object();
    case FieldKind::kArray:
      return v.is_array();
    case FieldKind::kAny:
      return true;
  }
  return true;
}

void CheckField(const OutputField& f, const Json& v, const std::string& path, std::vector<std::string>& out) {
  if (!KindMatches(f.kind, v)) {
    out.push_back("field " + path + ": expected " + std::string(KindName(f.kind)) + ", found " + v.type_name());
    return;
  }
  if (!f.allowed.empty() && v.is_string() &&
      std::find(f.allowed.begin(), f.allowed.end(), v.get<std::string>()) == f.allowed.end()) {
    std::string opts;
    for (const auto& a : f.allowed) opts += (opts.empty() ? "" : ", ") + a;
    out.push_back("field " + path + ": '" + v.get<std::string>() + "' is not one of [" + opts + "]");
  }
  if (f.kind == FieldKind::kObject) {
    for (const auto& m : f.fields) {
      if (!v.contains(m.name)) {
        if (m.required) out.push_back("missing field " + path + "." + m.name);
        continue;
      }
      CheckField(m, v[m.name], path + "." + m.name, out);
    }
  }
  if (f.kind == FieldKind::kArray && !f.fields.empty()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      CheckField(f.fields.front(), v[i], path + "[" + std::to_string(i) + "]", out);
    }
  }
}

std::string FieldTypeHint(const FieldSpec& f) {
  switch (f.type) {
    case FieldType::kString:
      return "string";
    case FieldType::kNumericString:
      return "numeric string";
    case FieldType::kInt:
      return "integer";
    case FieldType::kBool:
      return "boolean";
    case FieldType::kStringList:
      return "list of strings";
    case FieldType::kStringMap:
      return "string map";
    case FieldType::kStringListList:
      return "list of string lists";
    case FieldType::kSelector:
      return "pod selector (namespaces, labelSelectors, expressionSelectors, ...)";
    case FieldType::kPodSelector:
      return "target {mode, value, selector}";
    case FieldType::kObject:
      return "object";
  }
  return "value";
}

void DescribeFields(const std::vector<FieldSpec>& fields, const std::string& indent, std::ostringstream& os) {
  for (const auto& f : fields) {
    os << indent << "- " << f.name << " (" << FieldTypeHint(f) << (f.required ? ", required" : ", optional");
    if (!f.allowed.empty()) {
      os << ", one of:";
      for (const auto& a : f.allowed) os << " " << a;
    }
    if (f.min || f.max) {
      os << ", range " << (f.min ? std::to_string(*f.min) : "") << ".." << (f.max ? std::to_string(*f.max) : "");
    }
    os << ")\n";
    if (f.type == FieldType::kObject) DescribeFields(f.fields, indent + "  ", os);
  }
}

}  // namespace

const std::vector<std::string>& AgentIds() {
  static const std::vector<std::string> kIds = {"0-0", "0-1", "0-2",   "0-3",   "1-0", "1-1", "1-2",
                                                "1-3-a", "1-3-b", "1-4", "1-5", "1-6", "2-0", "2-1",
                                                "2-2", "2-3", "2-4", "3-0", "4-0", "EX"};
  return kIds;
}

PromptTemplate PromptTemplate::Parse(std::string id, std::string_view text) {
  PromptTemplate t;
  t.id = std::move(id);
  std::istringstream in{std::string(text)};
  std::string line, role, body;
  auto flush = [&] {
    if (!role.empty()) t.roles.emplace_back(role, Trim(body));
    body.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("@@ ", 0) == 0) {
      flush();
      role = Trim(line.substr(3));
      if (role != "system" && role != "user" && role != "assistant") {
        throw ConfigError("template " + t.id + ": unknown role '" + role + "'");
      }
      continue;
    }
    if (role.empty()) {
      if (!Trim(line).empty()) throw ConfigError("template " + t.id + ": text before the first role marker");
      continue;
    }
    body += line + "\n";
  }
  flush();
  if (t.roles.empty()) throw ConfigError("template " + t.id + ": no roles");
  for (const auto& [r, s] : t.roles) {
    for (std::size_t p = s.find("{{"); p != std::string::npos; p = s.find("{{", p + 2)) {
      const auto e = s.find("}}", p);
      if (e == std::string::npos) break;
      std::string name = s.substr(p + 2, e - p - 2);
      if (!name.empty() && name[0] == '@') {
        t.dynamic_slots.insert(name.substr(1));
      } else {
        t.placeholders.insert(name);
      }
    }
  }
  return t;
}

const PromptTemplate& GetTemplate(std::string_view id) {
  static const std::map<std::string, PromptTemplate> kTemplates = [] {
    std::map<std::string, PromptTemplate> m;
    for (const auto& [k, text] : internal::EmbeddedPrompts()) m.emplace(k, PromptTemplate::Parse(k, text));
    return m;
  }();
  auto it = kTemplates.find(std::string(id));
  if (it == kTemplates.end()) throw ConfigError("no prompt template for agent '" + std::string(id) + "'");
  return it->second;
}

std::string DynamicBlock(std::string_view slot, std::string_view condition) {
  if (slot == "detailed_param_instructions") {
    auto kind = ParseFaultKind(condition);
    if (!kind) throw ContractViolation("no parameter instructions for fault kind '" + std::string(condition) + "'");
    std::ostringstream os;
    os << "Parameters of " << FaultKindName(*kind) << ":\n";
    DescribeFields(SchemaFor(*kind).fields, "", os);
    os << "Selection modes one and all take no value; fixed takes a pod count and the percent modes take 1-100.";
    return os.str();
  }
  if (slot == "phase_planning_instructions") {
    if (condition == "pre-validation" || condition == "post-validation") {
      return "Schedule only unit tests in this stage, one entry per steady state. Tests usually start with a zero "
             "grace period.";
    }
    if (condition == "fault-injection") {
      return "Schedule every fault of the scenario exactly once, using its kind and name_id, together with the unit "
             "tests that should watch it. Faults listed together in the scenario share a grace period; later groups "
             "start after earlier ones.";
    }
    throw ContractViolation("no planning instructions for stage '" + std::string(condition) + "'");
  }
  throw ContractViolation("unknown dynamic slot '" + std::string(slot) + "'");
}

std::vector<ChatMessage> RenderPrompt(const PromptTemplate& tmpl, const PromptBindings& bindings) {
  for (const auto& slot : tmpl.dynamic_slots) {
    if (!bindings.conditions.count(slot)) {
      throw ContractViolation("template " + tmpl.id + ": no condition bound for dynamic slot '" + slot + "'");
    }
  }
  for (const auto& p : tmpl.placeholders) {
    if (p != "format_instructions" && !bindings.values.count(p)) {
      throw ContractViolation("template " + tmpl.id + ": unbound placeholder '" + p + "'");
    }
  }
  std::string schema_condition;
  if (!bindings.conditions.empty()) schema_condition = bindings.conditions.begin()->second;

  std::vector<ChatMessage> out;
  for (const auto& [role, text] : tmpl.roles) {
    std::string r;
    std::size_t pos = 0;
    while (true) {
      const auto p = text.find("{{", pos);
      if (p == std::string::npos) {
        r += text.substr(pos);
        break;
      }
      const auto e = text.find("}}", p);
      if (e == std::string::npos) {
        r += text.substr(pos);
        break;
      }
      r += text.substr(pos, p - pos);
      const std::string name = text.substr(p + 2, e - p - 2);
      if (!name.empty() && name[0] == '@') {
        r += DynamicBlock(name.substr(1), bindings.conditions.at(name.substr(1)));
      } else if (auto it = bindings.values.find(name); it != bindings.values.end()) {
        r += it->second;
      } else {
        const OutputSchema schema = SchemaForAgent(tmpl.id + (schema_condition.empty() ? "" : ":" + schema_condition));
        r += "Reply with a single JSON object and nothing else. It must conform to this JSON schema:\n" +
             schema.ToJsonSchema().dump(2);
      }
      pos = e + 2;
    }
    out.push_back({role, r});
  }
  return out;
}

const std::string& OutputSchema::first_field() const {
  if (fields.empty()) throw ContractViolation("output schema has no fields");
  return fields.front().name;
}

Json OutputSchema::ToJsonSchema() const {
  OutputField root;
  root.kind = FieldKind::kObject;
  root.fields = fields;
  return FieldSchema(root);
}

OutputSchema FaultParamOutputSchema(FaultKind kind) {
  OutputSchema s;
  for (const auto& f : SchemaFor(kind).fields) s.fields.push_back(FromCatalog(f));
  // Required fields first so the prefill opens with a field that must exist.
  std::stable_partition(s.fields.begin(), s.fields.end(), [](const OutputField& f) { return f.required; });
  return s;
}

// Ids may carry a condition after a colon: "1-6:PodChaos", "2-1:fault-injection".
OutputSchema SchemaForAgent(std::string_view id_with_condition) {
  const std::string full(id_with_condition);
  const auto colon = full.find(':');
  const std::string id = full.substr(0, colon);
  const std::string cond = colon == std::string::npos ? "" : full.substr(colon + 1);
  OutputSchema s;
  auto& f = s.fields;
  const OutputField thought = Str("thought", "reasoning behind the answer");
  if (id == "0-0") {
    f = {Str("k8s_summary", "summary of the manifest")};
  } else if (id == "0-1") {
    f = {Arr("issues", Obj("issue", {Str("issue_name"), Str("issue_details"), Arr("manifests", Str("file")),
                                      Str("problematic_config")}))};
  } else if (id == "0-2") {
    f = {thought, Str("k8s_application", "the application the manifests most likely run")};
  } else if (id == "0-3") {
    f = {Str("ce_instructions", "condensed chaos engineering instructions")};
  } else if (id == "1-0") {
    f = {thought, Str("manifest", "manifest file the state concerns"), Str("name", "lowercase hyphenated name")};
  } else if (id == "1-1") {
    f = {thought, Str("tool_type", "", {"cluster-api", "load-test"}), Str("metric", "", kMetricNames),
         Obj("target", {Str("namespace"), Str("kind", "", {}, false), Str("name", "", {}, false),
                        Typed("label_selector", FieldKind::kObject, "", false), Str("url", "", {}, false)})};
  } else if (id == "1-2") {
    f = {thought, Obj("threshold", {Str("metric", "", kMetricNames), Str("comparator", "", {">=", "<=", "=="}),
                                    Typed("value", FieldKind::kNumber), Str("description")})};
  } else if (id == "1-3-a" || id == "1-3-b") {
    f = {thought, Str("code", "complete script")};
  } else if (id == "1-4") {
    f = {thought, Typed("requires_addition", FieldKind::kBoolean)};
  } else if (id == "1-5") {
    f = {Str("event", "the real-world event being simulated"), thought,
         Arr("faults", Arr("group", Obj("fault", {Str("name", "", KindNames()), Typed("name_id", FieldKind::kInteger),
                                                 Str("scope", "which pods the fault hits")})))};
  } else if (id == "1-6") {
    auto kind = ParseFaultKind(cond);
    if (!kind) throw ContractViolation("schema 1-6 needs a fault kind, found '" + cond + "'");
    return FaultParamOutputSchema(*kind);
  } else if (id == "2-0") {
    f = {thought, Str("total_time"), Str("pre_validation_time"), Str("fault_injection_time"),
         Str("post_validation_time")};
  } else if (id == "2-1") {
    const OutputField tests =
        Arr("unit_tests", Obj("unit_test", {Str("name", "steady state name"), Str("grace_period"), Str("duration")}));
    if (cond == "fault-injection") {
      f = {thought,
           Arr("fault_injection", Obj("fault", {Str("name", "", KindNames()), Typed("name_id", FieldKind::kInteger),
                                               Str("grace_period"), Str("duration")})),
           tests};
    } else {
      f = {thought, tests};
    }
  } else if (id == "2-2") {
    f = {Str("summary", "timeline of the experiment")};
  } else if (id == "2-3") {
    f = {thought, Typed("selector", FieldKind::kObject)};
  } else if (id == "2-4") {
    f = {thought, Obj("target", {Str("namespace"), Str("kind"), Str("name", "", {}, false),
                                 Typed("label_selector", FieldKind::kObject, "", false)},
                      "new probe target, omitted when nothing changes", false)};
  } else if (id == "3-0") {
    f = {Str("report", "causes of the failures and countermeasures")};
  } else if (id == "4-0") {
    f = {thought, Arr("modified_k8s_yamls",
                      Obj("change", {Str("mod_type", "", {"create", "delete", "replace"}), Str("fname"),
                                     Str("explanation"), Str("code", "full manifest for create/replace", {}, false)}))};
  } else if (id == "EX") {
    f = {Str("summary", "summary of the cycle")};
  } else {
    throw ConfigError("no output schema for agent '" + id + "'");
  }
  return s;
}

std::string PrefillFor(const OutputSchema& schema) { return "{\"" + schema.first_field() + "\":"; }

std::vector<std::string> CheckAgainstSchema(const Json& value, const OutputSchema& schema) {
  std::vector<std::string> out;
  if (!value.is_object()) return {"expected a JSON object, found " + std::string(value.type_name())};
  for (const auto& f : schema.fields) {
    if (!value.contains(f.name)) {
      if (f.required) out.push_back("missing field " + f.name);
      continue;
    }
    CheckField(f, value[f.name], f.name, out);
  }
  return out;
}

Json ParseStructuredOutput(std::string_view text, const OutputSchema& schema) {
  std::string t = Trim(text);
  if (t.rfind("```", 0) == 0) {
    const auto nl = t.find('\n');
    t = nl == std::string::npos ? "" : t.substr(nl + 1);
    const auto close = t.rfind("```");
    if (close != std::string::npos) t = t.substr(0, close);
    t = Trim(t);
  }
  if (t.empty()) throw ParseError("empty output");
  Json j = Json::parse(t.front() == '{' ? t : PrefillFor(schema) + t, nullptr, false);
  if (j.is_discarded()) {
    const auto b = t.find('{');
    const auto e = t.rfind('}');
    if (b != std::string::npos && e != std::string::npos && e > b) j = Json::parse(t.substr(b, e - b + 1), nullptr, false);
  }
  if (j.is_discarded()) throw ParseError("output is not valid JSON");
  auto problems = CheckAgainstSchema(j, schema);
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw ParseError(msg);
  }
  return j;
}

std::vector<ChatMessage> WithFeedback(std::vector<ChatMessage> initial, const std::vector<Attempt>& history) {
  for (const auto& a : history) {
    if (a.error.empty()) continue;
    initial.push_back({"assistant", a.output});
    initial.push_back({"user", "That output was rejected:\n" + a.error + "\nReturn a corrected answer."});
  }
  return initial;
}

std::string FormatUsd(Picodollars amount) {
  if (amount < 0) throw ContractViolation("negative amount");
  constexpr Picodollars kCent = 10'000'000'000;  // 1e10 picodollars
  const Picodollars cents = (amount + kCent / 2) / kCent;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "$%lld.%02lld", static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  return buf;
}

Picodollars PricePerMillion(double usd) {
  if (usd < 0) throw ContractViolation("negative price");
  return static_cast<Picodollars>(std::llround(usd * 1e6));
}

CostLedger::CostLedger(const CostLedger& other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  price_in_ = other.price_in_;
  price_out_ = other.price_out_;
  rows_ = other.rows_;
}

CostLedger& CostLedger::operator=(const CostLedger& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  price_in_ = other.price_in_;
  price_out_ = other.price_out_;
  rows_ = other.rows_;
  return *this;
}

void CostLedger::Record(const std::string& phase, std::int64_t input_tokens, std::int64_t output_tokens,
                        bool approximate) {
  if (input_tokens < 0 || output_tokens < 0) throw ContractViolation("token counts must be non-negative");
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& [p, u] : rows_) {
    if (p == phase) {
      u.input_tokens += input_tokens;
      u.output_tokens += output_tokens;
      u.approximate = u.approximate || approximate;
      return;
    }
  }
  rows_.push_back({phase, PhaseUsage{input_tokens, output_tokens, 0.0, approximate}});
}

void CostLedger::AddWallTime(const std::string& phase, double seconds) {
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& [p, u] : rows_) {
    if (p == phase) {
      u.wall_seconds += seconds;
      return;
    }
  }
  rows_.push_back({phase, PhaseUsage{0, 0, seconds, false}});
}

void CostLedger::Merge(const CostLedger& other) {
  const CostLedger copy(other);
  for (const auto& [p, u] : copy.rows_) {
    Record(p, u.input_tokens, u.output_tokens, u.approximate);
    AddWallTime(p, u.wall_seconds);
  }
}

Picodollars CostLedger::Cost(const std::string& phase) const {
  const PhaseUsage u = usage(phase);
  return u.input_tokens * price_in_ + u.output_tokens * price_out_;
}

Picodollars CostLedger::TotalCost() const {
  const PhaseUsage u = Total();
  return u.input_tokens * price_in_ + u.output_tokens * price_out_;
}

PhaseUsage CostLedger::Total() const {
  std::lock_guard<std::mutex> lock(mu_);
  PhaseUsage t;
  for (const auto& [p, u] : rows_) {
    t.input_tokens += u.input_tokens;
    t.output_tokens += u.output_tokens;
    t.wall_seconds += u.wall_seconds;
    t.approximate = t.approximate || u.approximate;
  }
  return t;
}

std::vector<std::string> CostLedger::phases() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  for (const auto& [p, u] : rows_) out.push_back(p);
  return out;
}

PhaseUsage CostLedger::usage(const std::string& phase) const {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [p, u] : rows_) {
    if (p == phase) return u;
  }
  return {};
}

Json CostLedger::ToJson() const {
  Json rows = Json::array();
  for (const auto& p : phases()) {
    const PhaseUsage u = usage(p);
    rows.push_back(Json{{"phase", p},
                        {"input_tokens", u.input_tokens},
                        {"output_tokens", u.output_tokens},
                        {"cost_usd", FormatUsd(Cost(p))},
                        {"wall_seconds", u.wall_seconds},
                        {"approximate", u.approximate}});
  }
  const PhaseUsage t = Total();
  return Json{{"price_in_usd_per_million", static_cast<double>(price_in_) / 1e6},
              {"price_out_usd_per_million", static_cast<double>(price_out_) / 1e6},
              {"phases", rows},
              {"total",
               {{"input_tokens", t.input_tokens},
                {"output_tokens", t.output_tokens},
                {"cost_usd", FormatUsd(TotalCost())},
                {"cost_picodollars", TotalCost()},
                {"wall_seconds", t.wall_seconds},
                {"approximate", t.approximate}}}};
}

std::int64_t ApproximateTokens(std::string_view text) {
  std::int64_t n = 0;
  bool in = false;
  for (char c : text) {
    const bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!ws && !in) ++n;
    in = !ws;
  }
  return n;
}

}  // namespace chaoscycle
