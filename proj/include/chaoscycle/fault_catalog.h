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

// Parameter schemas of the supported Chaos Mesh fault kinds.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chaoscycle/domain.h"

namespace chaoscycle {

enum class FieldType {
  kString,
  kNumericString,  // documented as a string; numbers are accepted and quoted
  kInt,
  kBool,
  kStringList,
  kStringMap,
  kStringListList,
  kSelector,     // Chaos Mesh pod selector
  kPodSelector,  // {mode, value, selector} as used by NetworkChaos.target
  kObject,
};

struct FieldSpec {
  std::string name;
  FieldType type = FieldType::kString;
  bool required = false;
  std::vector<std::string> allowed;  // enumeration, empty when free
  std::vector<FieldSpec> fields;     // members of kObject
  std::optional<std::int64_t> min, max;
};

struct FaultParamSchema {
  FaultKind kind;
  std::vector<FieldSpec> fields;

  std::vector<std::string> required_fields() const;
  const FieldSpec* Field(std::string_view name) const;
};

inline const std::vector<std::string> kSelectionModes = {
    "one", "all", "fixed", "fixed-percent", "random-max-percent"};

const FaultParamSchema& SchemaFor(FaultKind kind);

// "podChaos", "networkChaos", ...
std::string TemplateKey(FaultKind kind);

struct FaultCheck {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

// Each violation reads "<kind>.<field>: expected <domain>, found <value>".
// Unknown fields (duration included) only produce warnings.
FaultCheck ValidateFault(const Fault& fault);

// Removes a top-level "duration"; the deadline carries timing instead.
Json StripDuration(Json params);

// {"podChaos": {...}} with sorted keys and string-typed fields quoted.
// Throws ValidationError when ValidateFault fails.
Json RenderFaultBody(const Fault& fault);

// Inverse of RenderFaultBody. Accepts the keyed body or a bare params map.
Fault ParseFaultBody(FaultKind kind, const Json& body, int name_id = 0);

}  // namespace chaoscycle
