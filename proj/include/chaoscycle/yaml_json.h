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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chaoscycle/domain.h"

namespace chaoscycle {

// Parses one YAML document. Plain scalars are typed (null, bool, int,
// float, string); quoted and block scalars always stay strings.
// Throws ParseError with the parser's line/column.
Json ParseYaml(std::string_view text);

// Splits a multi-document stream. Empty documents are dropped.
std::vector<Json> ParseYamlAll(std::string_view text);

// Block-style YAML. Strings that would re-parse as another type are
// single-quoted, so ParseYaml(DumpYaml(j)) == j.
std::string DumpYaml(const Json& value);

// Recursively sorts object keys. Used for structural comparisons.
Json SortKeys(const Json& value);

}  // namespace chaoscycle
