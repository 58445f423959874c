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

#include "chaoscycle/fault_catalog.h"

#include <algorithm>
#include <cctype>
#include <regex>

#include "chaoscycle/error.h"
#include "chaoscycle/yaml_json.h"

namespace chaoscycle {

namespace {

FieldSpec F(std::string name, FieldType type, bool required = false,
            std::vector<std::string> allowed = {}) {
  FieldSpec f;
  f.name = std::move(name);
  f.type = type;
  f.required = required;
  f.allowed = std::move(allowed);
  return f;
}

FieldSpec Ranged(std::string name, std::int64_t lo, std::optional<std::int64_t> hi = std::nullopt) {
  FieldSpec f = F(std::move(name), FieldType::kInt);
  f.min = lo;
  f.max = hi;
  return f;
}

FieldSpec Obj(std::string name, std::vector<FieldSpec> fields, bool required = false) {
  FieldSpec f = F(std::move(name), FieldType::kObject, required);
  f.fields = std::move(fields);
  return f;
}

FieldSpec Mode() { return F("mode", FieldType::kString, true, kSelectionModes); }
FieldSpec Value() { return F("value", FieldType::kNumericString); }
FieldSpec Selector(bool required = true) { return F("selector", FieldType::kSelector, required); }
FieldSpec ContainerNames() { return F("containerNames", FieldType::kStringList); }

std::vector<FaultParamSchema> BuildSchemas() {
  std::vector<FaultParamSchema> s;
  s.push_back({FaultKind::kPodChaos,
               {F("action", FieldType::kString, true, {"pod-kill", "container-kill"}), Mode(), Value(),
                Selector(), ContainerNames()}});

  const FieldSpec correlation = F("correlation", FieldType::kNumericString);
  s.push_back({FaultKind::kNetworkChaos,
               {F("action", FieldType::kString, true,
                  {"netem", "delay", "loss", "duplicate", "corrupt", "partition", "bandwidth"}),
                F("direction", FieldType::kString, false, {"from", "to", "both"}),
                F("target", FieldType::kPodSelector), Mode(), Value(), Selector(),
                F("externalTargets", FieldType::kStringList), F("device", FieldType::kString),
                Obj("delay", {F("latency", FieldType::kString), correlation, F("jitter", FieldType::kString),
                              Obj("reorder", {F("reorder", FieldType::kNumericString), correlation,
                                              Ranged("gap", 0)})}),
                Obj("loss", {F("loss", FieldType::kNumericString), correlation}),
                Obj("duplicated", {F("duplicate", FieldType::kNumericString), correlation}),
                Obj("corrupt", {F("corrupt", FieldType::kNumericString), correlation}),
                Obj("rate", {F("rate", FieldType::kString)}),
                Obj("bandwidth", {F("rate", FieldType::kString), Ranged("limit", 0), Ranged("buffer", 0),
                                  Ranged("peakrate", 0), Ranged("minburst", 0)})}});

  s.push_back({FaultKind::kDNSChaos,
               {F("action", FieldType::kString, false, {"random", "error"}),
                F("mode", FieldType::kString, false, kSelectionModes), Value(),
                F("patterns", FieldType::kStringList), Selector()}});

  const FieldSpec headers = F("headers", FieldType::kStringMap);
  s.push_back({FaultKind::kHTTPChaos,
               {Mode(), Value(), F("target", FieldType::kString, true, {"Request", "Response"}),
                [] { FieldSpec p = Ranged("port", 1, 65535); p.required = true; return p; }(),
                Ranged("code", 100, 599), F("path", FieldType::kString), F("method", FieldType::kString),
                F("request_headers", FieldType::kStringMap), F("abort", FieldType::kBool),
                F("delay", FieldType::kString),
                Obj("replace", {headers, F("body", FieldType::kString), F("path", FieldType::kString),
                                F("method", FieldType::kString), F("queries", FieldType::kStringListList),
                                Ranged("code", 100, 599)}),
                Obj("patch", {F("headers", FieldType::kStringListList),
                              Obj("body", {F("type", FieldType::kString), F("value", FieldType::kString)}),
                              F("queries", FieldType::kStringListList)}),
                Selector(false)}});

  s.push_back({FaultKind::kStressChaos,
               {Mode(), Value(),
                Obj("stressors", {Obj("memory", {Ranged("workers", 1), F("size", FieldType::kString),
                                                 Ranged("oomScoreAdj", -1000, 1000)}),
                                  Obj("cpu", {Ranged("workers", 1), Ranged("load", 0, 100)})}),
                F("stressngStressors", FieldType::kString), ContainerNames(), Selector()}});

  s.push_back({FaultKind::kIOChaos,
               {F("action", FieldType::kString, true, {"latency", "fault", "attrOverride", "mistake"}), Mode(),
                Selector(), Value(), F("volumePath", FieldType::kString, true), F("path", FieldType::kString),
                F("methods", FieldType::kStringList), Ranged("percent", 0, 100), ContainerNames(),
                F("delay", FieldType::kString), Ranged("errno", 0),
                Obj("attr", {Ranged("ino", 0), Ranged("size", 0), Ranged("blocks", 0),
                             Obj("atime", {Ranged("sec", 0), Ranged("nsec", 0)}),
                             Obj("mtime", {Ranged("sec", 0), Ranged("nsec", 0)}),
                             Obj("ctime", {Ranged("sec", 0), Ranged("nsec", 0)}), F("kind", FieldType::kString),
                             Ranged("perm", 0), Ranged("nlink", 0), Ranged("uid", 0), Ranged("gid", 0),
                             Ranged("rdev", 0)}),
                Obj("mistake", {F("filling", FieldType::kString, true, {"zero", "random"}),
                                [] { FieldSpec f = Ranged("maxOccurrences", 1); f.required = true; return f; }(),
                                [] { FieldSpec f = Ranged("maxLength", 1); f.required = true; return f; }()})}});

  s.push_back({FaultKind::kTimeChaos,
               {F("timeOffset", FieldType::kString, true), F("clockIds", FieldType::kStringList), Mode(), Value(),
                ContainerNames(), Selector()}});
  return s;
}

const std::vector<FaultParamSchema>& Schemas() {
  static const std::vector<FaultParamSchema> kSchemas = BuildSchemas();
  return kSchemas;
}

std::string Found(const Json& v) {
  if (v.is_string()) return "'" + v.get<std::string>() + "'";
  return v.dump();
}

std::string OneOf(const std::vector<std::string>& allowed) {
  std::string s = "one of {";
  for (std::size_t i = 0; i < allowed.size(); ++i) s += (i ? ", " : "") + allowed[i];
  return s + "}";
}

bool IsStringList(const Json& v) {
  return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_string(); });
}

bool IsStringMap(const Json& v) {
  if (!v.is_object()) return false;
  for (const auto& [k, x] : v.items()) {
    if (!x.is_string()) return false;
  }
  return true;
}

class Checker {
 public:
  explicit Checker(FaultCheck& out) : out_(out) {}

  void Fields(const std::string& path, const std::vector<FieldSpec>& specs, const Json& obj) {
    if (!obj.is_object()) {
      Violation(path, "an object", obj);
      return;
    }
    for (const auto& spec : specs) {
      if (spec.required && !obj.contains(spec.name)) {
        out_.violations.push_back(path + "." + spec.name + ": required field missing");
      }
    }
    for (const auto& [key, value] : obj.items()) {
      auto it = std::find_if(specs.begin(), specs.end(), [&](const FieldSpec& f) { return f.name == key; });
      if (it == specs.end()) {
        if (key == "duration") {
          out_.warnings.push_back(path + ".duration: ignored, the node deadline sets the fault length");
        } else {
          out_.warnings.push_back(path + "." + key + ": unknown field ignored");
        }
        continue;
      }
      Field(path + "." + key, *it, value);
    }
  }

  void Field(const std::string& path, const FieldSpec& spec, const Json& v) {
    switch (spec.type) {
      case FieldType::kString:
        if (!v.is_string()) return Violation(path, "a string", v);
        if (!spec.allowed.empty() &&
            std::find(spec.allowed.begin(), spec.allowed.end(), v.get<std::string>()) == spec.allowed.end()) {
          return Violation(path, OneOf(spec.allowed), v);
        }
        break;
      case FieldType::kNumericString:
        if (!v.is_string() && !v.is_number()) return Violation(path, "a string", v);
        break;
      case FieldType::kInt:
        if (!v.is_number_integer()) return Violation(path, "an integer", v);
        if (spec.min && v.get<std::int64_t>() < *spec.min) {
          return Violation(path, "an integer >= " + std::to_string(*spec.min), v);
        }
        if (spec.max && v.get<std::int64_t>() > *spec.max) {
          return Violation(path, "an integer <= " + std::to_string(*spec.max), v);
        }
        break;
      case FieldType::kBool:
        if (!v.is_boolean()) return Violation(path, "a boolean", v);
        break;
      case FieldType::kStringList:
        if (!IsStringList(v)) return Violation(path, "a list of strings", v);
        break;
      case FieldType::kStringMap:
        if (!IsStringMap(v)) return Violation(path, "a string-to-string map", v);
        break;
      case FieldType::kStringListList:
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), IsStringList)) {
          return Violation(path, "a list of string lists", v);
        }
        break;
      case FieldType::kSelector:
        SelectorField(path, v);
        break;
      case FieldType::kPodSelector:
        Fields(path, {Mode(), Value(), Selector()}, v);
        if (v.is_object()) ModeValue(path, v);
        break;
      case FieldType::kObject:
        Fields(path, spec.fields, v);
        break;
    }
  }

  void SelectorField(const std::string& path, const Json& v) {
    static const std::vector<FieldSpec> kSelectorFields = {
        F("namespaces", FieldType::kStringList),      F("labelSelectors", FieldType::kStringMap),
        F("expressionSelectors", FieldType::kObject), F("annotationSelectors", FieldType::kStringMap),
        F("fieldSelectors", FieldType::kStringMap),   F("podPhaseSelectors", FieldType::kStringList),
        F("nodeSelectors", FieldType::kStringMap),    F("nodes", FieldType::kStringList),
        F("pods", FieldType::kObject)};
    if (!v.is_object()) return Violation(path, "a selector object", v);
    if (v.empty()) {
      out_.violations.push_back(path + ": expected at least one selection dimension, found {}");
      return;
    }
    for (const auto& [key, value] : v.items()) {
      const std::string p = path + "." + key;
      if (key == "expressionSelectors") {
        if (!value.is_array()) {
          Violation(p, "a list of requirements", value);
          continue;
        }
        for (const auto& req : value) {
          Fields(p, {F("key", FieldType::kString, true),
                     F("operator", FieldType::kString, true, {"In", "NotIn", "Exists", "DoesNotExist"}),
                     F("values", FieldType::kStringList, true)},
                 req);
        }
      } else if (key == "pods") {
        if (!value.is_object() ||
            !std::all_of(value.begin(), value.end(), [](const Json& x) { return IsStringList(x); })) {
          Violation(p, "a namespace-to-pod-names map", value);
        }
      } else if (key == "podPhaseSelectors") {
        Field(p, F(key, FieldType::kStringList), value);
        if (IsStringList(value)) {
          static const std::vector<std::string> kPhases = {"Pending", "Running", "Succeeded", "Failed", "Unknown"};
          for (const auto& ph : value) {
            Field(p, F(key, FieldType::kString, false, kPhases), ph);
          }
        }
      } else {
        auto it = std::find_if(kSelectorFields.begin(), kSelectorFields.end(),
                               [&](const FieldSpec& f) { return f.name == key; });
        if (it == kSelectorFields.end()) {
          out_.warnings.push_back(p + ": unknown selector field ignored");
        } else {
          Field(p, *it, value);
        }
      }
    }
  }

  void ModeValue(const std::string& path, const Json& params) {
    if (!params.contains("mode") || !params["mode"].is_string()) return;
    const std::string mode = params["mode"].get<std::string>();
    if (mode != "fixed" && mode != "fixed-percent" && mode != "random-max-percent") return;
    if (!params.contains("value")) {
      out_.violations.push_back(path + ".value: required when mode is " + mode);
      return;
    }
    const Json& v = params["value"];
    std::int64_t n = -1;
    if (v.is_number_integer()) {
      n = v.get<std::int64_t>();
    } else if (v.is_string() && std::regex_match(v.get<std::string>(), std::regex("[0-9]{1,9}"))) {
      n = std::stoll(v.get<std::string>());
    }
    const bool percent = mode != "fixed";
    if (n < 1 || (percent && n > 100)) {
      Violation(path + ".value", percent ? "a percentage in [1, 100]" : "a positive integer", v);
    }
  }

  void Violation(const std::string& path, const std::string& expected, const Json& found) {
    out_.violations.push_back(path + ": expected " + expected + ", found " + Found(found));
  }

 private:
  FaultCheck& out_;
};

bool ActionIs(const Json& p, const char* action) {
  return p.contains("action") && p["action"].is_string() && p["action"].get<std::string>() == action;
}

void KindRules(const Fault& f, const std::string& path, FaultCheck& out) {
  const Json& p = f.params;
  switch (f.kind) {
    case FaultKind::kPodChaos:
      if (ActionIs(p, "container-kill") &&
          (!p.contains("containerNames") || !p["containerNames"].is_array() || p["containerNames"].empty())) {
        out.violations.push_back(path + ".containerNames: required when action is container-kill");
      }
      break;
    case FaultKind::kNetworkChaos:
      if (ActionIs(p, "delay") && !(p.contains("delay") && p["delay"].is_object() && p["delay"].contains("latency"))) {
        out.violations.push_back(path + ".delay.latency: required when action is delay");
      }
      if (ActionIs(p, "bandwidth") &&
          !(p.contains("bandwidth") && p["bandwidth"].is_object() && p["bandwidth"].contains("rate"))) {
        out.violations.push_back(path + ".bandwidth.rate: required when action is bandwidth");
      }
      if (ActionIs(p, "netem") && !p.contains("target") && p.contains("direction") && p["direction"] != "to") {
        out.violations.push_back(path + ".direction: expected 'to' when netem has no target, found " +
                                 Found(p["direction"]));
      }
      break;
    case FaultKind::kStressChaos:
      if (!p.contains("stressors") && !p.contains("stressngStressors")) {
        out.violations.push_back(path + ".stressors: required unless stressngStressors is set");
      } else if (p.contains("stressors") && p["stressors"].is_object() && p["stressors"].empty()) {
        out.violations.push_back(path + ".stressors: expected cpu and/or memory, found {}");
      }
      break;
    case FaultKind::kIOChaos:
      if (ActionIs(p, "attrOverride") && !p.contains("attr")) {
        out.violations.push_back(path + ".attr: required when action is attrOverride");
      }
      if (ActionIs(p, "mistake") && !p.contains("mistake")) {
        out.violations.push_back(path + ".mistake: required when action is mistake");
      }
      break;
    case FaultKind::kTimeChaos:
      if (p.contains("timeOffset") && p["timeOffset"].is_string() &&
          !std::regex_match(p["timeOffset"].get<std::string>(),
                            std::regex(R"(^[-+]?([0-9]+(\.[0-9]+)?(ns|us|ms|s|m|h))+$)"))) {
        out.violations.push_back(path + ".timeOffset: expected a signed duration such as -10m, found " +
                                 Found(p["timeOffset"]));
      }
      break;
    case FaultKind::kDNSChaos:
    case FaultKind::kHTTPChaos:
      break;
  }
}

Json Quote(const FieldSpec& spec, const Json& v);

Json QuoteFields(const std::vector<FieldSpec>& specs, const Json& obj) {
  if (!obj.is_object()) return obj;
  Json out = obj;
  for (const auto& spec : specs) {
    if (out.contains(spec.name)) out[spec.name] = Quote(spec, out[spec.name]);
  }
  return out;
}

Json Quote(const FieldSpec& spec, const Json& v) {
  switch (spec.type) {
    case FieldType::kNumericString:
      if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
      if (v.is_number()) {
        std::string s = Json(v.get<double>()).dump();
        return s;
      }
      return v;
    case FieldType::kObject:
      return QuoteFields(spec.fields, v);
    case FieldType::kPodSelector:
      return QuoteFields({Value()}, v);
    default:
      return v;
  }
}

}  // namespace

std::vector<std::string> FaultParamSchema::required_fields() const {
  std::vector<std::string> out;
  for (const auto& f : fields) {
    if (f.required) out.push_back(f.name);
  }
  return out;
}

const FieldSpec* FaultParamSchema::Field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const FaultParamSchema& SchemaFor(FaultKind kind) {
  for (const auto& s : Schemas()) {
    if (s.kind == kind) return s;
  }
  throw ContractViolation("no schema for fault kind");
}

std::string TemplateKey(FaultKind kind) {
  std::string s(FaultKindName(kind));
  // Leading acronyms lower-case as a block: DNSChaos -> dnsChaos, IOChaos -> ioChaos.
  std::size_t n = 0;
  while (n < s.size() && std::isupper(static_cast<unsigned char>(s[n]))) ++n;
  const std::size_t lower = n > 1 ? n - 1 : 1;
  for (std::size_t i = 0; i < lower; ++i) s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
  return s;
}

FaultCheck ValidateFault(const Fault& fault) {
  FaultCheck out;
  const FaultParamSchema& schema = SchemaFor(fault.kind);
  const std::string path(FaultKindName(fault.kind));
  Checker checker(out);
  checker.Fields(path, schema.fields, fault.params);
  if (fault.params.is_object()) {
    checker.ModeValue(path, fault.params);
    KindRules(fault, path, out);
  }
  if (fault.name_id < 0) out.violations.push_back(path + ".name_id: expected a non-negative integer");
  return out;
}

Json StripDuration(Json params) {
  if (params.is_object()) params.erase("duration");
  return params;
}

Json RenderFaultBody(const Fault& fault) {
  const FaultCheck check = ValidateFault(fault);
  if (!check.ok()) throw ValidationError(check.violations);
  const FaultParamSchema& schema = SchemaFor(fault.kind);
  Json body = QuoteFields(schema.fields, StripDuration(fault.params));
  Json out = Json::object();
  out[TemplateKey(fault.kind)] = SortKeys(body);
  return out;
}

Fault ParseFaultBody(FaultKind kind, const Json& body, int name_id) {
  const std::string key = TemplateKey(kind);
  Fault f;
  f.kind = kind;
  f.name_id = name_id;
  if (body.is_object() && body.contains(key)) {
    f.params = body.at(key);
  } else {
    f.params = body;
  }
  if (!f.params.is_object()) throw ParseError(key + " body must be an object");
  return f;
}

}  // namespace chaoscycle
