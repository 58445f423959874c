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

#include "chaoscycle/duration.h"

#include <cctype>
#include <limits>

#include "chaoscycle/error.h"

namespace chaoscycle {

Duration::Duration(std::int64_t seconds) : seconds_(seconds) {
  if (seconds < 0) {
    throw ContractViolation("negative duration: " + std::to_string(seconds));
  }
}

Duration ParseDuration(std::string_view text) {
  if (text.empty()) throw ParseError("empty duration");

  std::int64_t total = 0;
  // Units must appear in h, m, s order, each at most once.
  int next_unit_rank = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t token_start = pos;
    std::int64_t value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (value > std::numeric_limits<std::int64_t>::max() / 10 - 10) {
        throw ParseError("duration component too large in '" + std::string(text) + "'");
      }
      value = value * 10 + (text[pos] - '0');
      ++pos;
    }
    if (pos == token_start || pos == text.size()) {
      throw ParseError("malformed duration token '" +
                       std::string(text.substr(token_start)) + "' in '" +
                       std::string(text) + "'");
    }
    const char unit = text[pos++];
    int rank = -1;
    std::int64_t scale = 0;
    switch (unit) {
      case 'h': rank = 0; scale = 3600; break;
      case 'm': rank = 1; scale = 60; break;
      case 's': rank = 2; scale = 1; break;
      default:
        throw ParseError("unknown duration unit '" + std::string(1, unit) +
                         "' in '" + std::string(text) + "'");
    }
    if (rank < next_unit_rank) {
      throw ParseError("duration unit '" + std::string(1, unit) +
                       "' out of order in '" + std::string(text) + "'");
    }
    next_unit_rank = rank + 1;
    total += value * scale;
  }
  return Duration(total);
}

std::string FormatDuration(Duration d) {
  std::int64_t s = d.seconds();
  if (s == 0) return "0s";
  std::string out;
  if (const auto h = s / 3600; h > 0) out += std::to_string(h) + "h";
  if (const auto m = (s % 3600) / 60; m > 0) out += std::to_string(m) + "m";
  if (const auto r = s % 60; r > 0) out += std::to_string(r) + "s";
  return out;
}

}  // namespace chaoscycle
