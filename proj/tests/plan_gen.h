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

// Random valid three-stage plans with a matching hypothesis.

#pragma once

#include <map>
#include <random>
#include <string>

#include "chaoscycle/experiment_compiler.h"
#include "fault_gen.h"

namespace chaoscycle::testing {

struct GeneratedCase {
  Hypothesis hypothesis;
  ExperimentPlan plan;
};

class PlanGenerator {
 public:
  explicit PlanGenerator(std::uint64_t seed) : rng_(seed), faults_(seed ^ 0x9e3779b97f4a7c15ULL) {}

  GeneratedCase Make() {
    const int n_states = Int(1, 4);
    std::vector<SteadyState> states;
    for (int i = 0; i < n_states; ++i) {
      SteadyState s;
      s.name = "state-" + std::to_string(i);
      s.threshold = {ThresholdMetric::kRunningRatio, Comparator::kAtLeast, 0.9, ""};
      s.vac.tool = ProbeTool::kClusterApi;
      s.vac.target = ProbeTarget{"default", "Pod", "example-pod", {}, ""};
      s.vac.script_path = "sandbox/cycle_x/unittest_" + s.name + "_mod0.py";
      states.push_back(s);
    }

    ExperimentPlan p;
    p.pre_time = Duration::Seconds(Int(1, 40));
    p.fault_time = Duration::Seconds(Int(1, 90));
    p.post_time = Duration::Seconds(Int(1, 40));
    p.total_time = p.pre_time + p.fault_time + p.post_time;

    std::map<FaultKind, int> next_id;
    std::vector<Fault> injected;
    for (Stage stage : kStages) {
      const Duration limit = p.stage_time(stage);
      // A small grace palette makes shared graces (merged groups) common.
      std::vector<std::int64_t> palette{0};
      for (int k = Int(0, 3); k > 0; --k) palette.push_back(Int(0, static_cast<int>(limit.seconds()) - 1));
      const int n_tests = Int(stage == Stage::kFaultInjection ? 0 : 1, 4);
      const int n_faults = stage == Stage::kFaultInjection ? Int(1, 4) : 0;
      for (int i = 0; i < n_tests + n_faults; ++i) {
        const std::int64_t grace = palette[Int(0, static_cast<int>(palette.size()) - 1)];
        const std::int64_t dur = Int(1, static_cast<int>(limit.seconds() - grace));
        if (i < n_tests) {
          const auto& s = states[Int(0, n_states - 1)];
          p.items(stage).push_back(
              ScheduleItem::Test(s.name, Duration::Seconds(grace), Duration::Seconds(dur), s.vac));
        } else {
          Fault f = faults_.Make(kAllFaultKinds[Int(0, 6)]);
          f.name_id = next_id[f.kind]++;
          injected.push_back(f);
          p.items(stage).push_back(ScheduleItem::Inject(Duration::Seconds(grace), Duration::Seconds(dur), f));
        }
      }
      std::shuffle(p.items(stage).begin(), p.items(stage).end(), rng_);
    }
    FailureScenario sc{"random", "generated", {}};
    for (const auto& f : injected) sc.sequence.push_back({f});
    return {Hypothesis::Make(states, sc, 8), p};
  }

 private:
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, std::max(lo, hi))(rng_); }

  std::mt19937_64 rng_;
  FaultGenerator faults_;
};

}  // namespace chaoscycle::testing
