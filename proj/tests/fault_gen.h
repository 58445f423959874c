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

// Random valid fault records, generated from the schema table.

#pragma once

#include <random>
#include <string>

#include "chaoscycle/fault_catalog.h"

namespace chaoscycle::testing {

class FaultGenerator {
 public:
  explicit FaultGenerator(std::uint64_t seed) : rng_(seed) {}

  Fault Make(FaultKind kind) {
    Fault f;
    f.kind = kind;
    f.name_id = Int(0, 3);
    f.params = Object(SchemaFor(kind).fields);
    FixUp(f);
    return f;
  }

 private:
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool Coin() { return Int(0, 1) == 1; }
  std::string Token() { return "t" + std::to_string(Int(0, 999)); }

  Json Selector() {
    Json s = Json::object();
    s["namespaces"] = Json::array({Coin() ? "default" : "sock-shop"});
    if (Coin()) s["labelSelectors"] = Json{{"app", Token()}};
    if (Coin()) {
      s["expressionSelectors"] = Json::array({Json{{"key", "tier"}, {"operator", "In"}, {"values", {Token()}}}});
    }
    if (Coin()) s["podPhaseSelectors"] = Json::array({"Running"});
    return s;
  }

  Json Value(const FieldSpec& spec) {
    switch (spec.type) {
      case FieldType::kString:
        if (!spec.allowed.empty()) return spec.allowed[Int(0, static_cast<int>(spec.allowed.size()) - 1)];
        return std::to_string(Int(1, 500)) + "ms";
      case FieldType::kNumericString:
        return Coin() ? Json(std::to_string(Int(0, 100))) : Json(Int(0, 100));
      case FieldType::kInt: {
        const int lo = spec.min ? static_cast<int>(*spec.min) : 0;
        const int hi = spec.max ? static_cast<int>(*spec.max) : lo + 1000;
        return Int(lo, hi);
      }
      case FieldType::kBool:
        return Coin();
      case FieldType::kStringList:
        return Json::array({Token(), Token()});
      case FieldType::kStringMap:
        return Json{{Token(), Token()}};
      case FieldType::kStringListList:
        return Json::array({Json::array({Token(), Token()})});
      case FieldType::kSelector:
        return Selector();
      case FieldType::kPodSelector:
        return Json{{"mode", Coin() ? "one" : "all"}, {"selector", Selector()}};
      case FieldType::kObject:
        return Object(spec.fields);
    }
    return nullptr;
  }

  Json Object(const std::vector<FieldSpec>& fields) {
    Json obj = Json::object();
    for (const auto& spec : fields) {
      if (spec.required || Coin()) obj[spec.name] = Value(spec);
    }
    return obj;
  }

  void FixUp(Fault& f) {
    Json& p = f.params;
    const std::string mode = p.value("mode", "");
    if (mode == "fixed" || mode == "fixed-percent" || mode == "random-max-percent") {
      p["value"] = std::to_string(Int(1, 100));
    } else if (p.contains("value") && Coin()) {
      p.erase("value");
    }
    const std::string action = p.value("action", "");
    switch (f.kind) {
      case FaultKind::kPodChaos:
        if (action == "container-kill") p["containerNames"] = Json::array({Token()});
        break;
      case FaultKind::kNetworkChaos:
        if (action == "delay") p["delay"]["latency"] = "100ms";
        if (action == "bandwidth") p["bandwidth"]["rate"] = "1mbps";
        if (action == "netem" && !p.contains("target")) p["direction"] = "to";
        break;
      case FaultKind::kStressChaos:
        if (!p.contains("stressors") || p["stressors"].empty()) {
          p["stressors"] = Json{{"cpu", {{"workers", Int(1, 4)}, {"load", Int(0, 100)}}}};
        }
        break;
      case FaultKind::kIOChaos:
        if (action == "attrOverride" && !p.contains("attr")) p["attr"] = Json{{"perm", 72}};
        if (action == "mistake" && !p.contains("mistake")) {
          p["mistake"] = Json{{"filling", "zero"}, {"maxOccurrences", 1}, {"maxLength", 10}};
        }
        break;
      case FaultKind::kTimeChaos:
        p["timeOffset"] = (Coin() ? "-" : "") + std::to_string(Int(1, 59)) + (Coin() ? "m" : "s");
        break;
      default:
        break;
    }
    if (p.contains("target") && p["target"].is_object()) {
      const std::string tmode = p["target"].value("mode", "");
      if (tmode != "one" && tmode != "all") p["target"]["mode"] = "all";
      p["target"].erase("value");
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace chaoscycle::testing
