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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace chaoscycle {

// Whole-second, non-negative span of time. Formats in the compact
// Go-style form used by Chaos Mesh deadlines ("5m10s", "30m51s").
class Duration {
 public:
  constexpr Duration() = default;
  // Throws ContractViolation on a negative count.
  explicit Duration(std::int64_t seconds);

  static constexpr Duration Seconds(std::int64_t s) {
    Duration d;
    d.seconds_ = s < 0 ? 0 : s;
    return d;
  }
  static constexpr Duration Minutes(std::int64_t m) { return Seconds(m * 60); }

  constexpr std::int64_t seconds() const { return seconds_; }
  constexpr bool is_zero() const { return seconds_ == 0; }

  constexpr auto operator<=>(const Duration&) const = default;

  constexpr Duration operator+(Duration other) const {
    return Seconds(seconds_ + other.seconds_);
  }
  constexpr Duration& operator+=(Duration other) {
    seconds_ += other.seconds_;
    return *this;
  }

 private:
  std::int64_t seconds_ = 0;
};

constexpr Duration Max(Duration a, Duration b) { return a < b ? b : a; }

// Accepts ^(\d+h)?(\d+m)?(\d+s)?$ with at least one component.
// Throws ParseError naming the offending token.
Duration ParseDuration(std::string_view text);

// Largest unit first, zero components omitted; 0 formats as "0s".
std::string FormatDuration(Duration d);

}  // namespace chaoscycle
