// Copyright 2026 The coldplan Authors. All Rights Reserved.
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

#ifndef COLDPLAN_WARM_HPP_
#define COLDPLAN_WARM_HPP_

#include <vector>

#include "coldplan/scheduler.hpp"
#include "coldplan/simulator.hpp"

namespace coldplan {

struct ExtraPrep {
  int layer = 0;
  VariantScore variant;  // the warm kernel's prep to run
  CoreId core = 0;
  Ms start_ms = 0.0;
  Ms duration_ms = 0.0;  // little-core prep time of the bundle
};

// Kernel switching for continuous inference: prepare the warm-optimal
// kernels inside little-core idle slots of the cold timeline.
struct WarmSwitchPlan {
  std::vector<VariantScore> k_cold;
  std::vector<VariantScore> k_warm;    // per-layer argmin of execute_ms
  std::vector<ExtraPrep> extra_preps;  // fitted into idle windows
  std::vector<int> residual;           // layers whose warm prep did not fit
};

// Packs the differing layers' warm prep bundles first-fit-decreasing into
// windows that are idle on a little core, globally quiet of disk/memory
// traffic, and disjoint from other injected preps — so injecting them can
// not move any cold operation. allow_cache = false keeps warm preps on raw
// reads (no cached weight files exist on disk then).
WarmSwitchPlan plan_warm_switch(const Plan& cold_plan, const SimReport& cold_report,
                                const ModelProfile& profile, const PlatformConfig& platform,
                                bool allow_cache = true);

Ms warm_execute_sum(const WarmSwitchPlan& wsp);

// Second inference: pure warm execution when nothing is residual, otherwise
// a reduced pipeline where only residual layers still carry prep operations.
// Setup is zeroed (memory stays allocated between inferences).
Ms second_inference_latency(const WarmSwitchPlan& wsp, const ModelProfile& profile,
                            const PlatformConfig& platform, const SchedulerConfig& cfg = {});

// The extra_preps as simulator injections (for non-interference replay).
std::vector<InjectedOp> injected_ops(const WarmSwitchPlan& wsp);

}  // namespace coldplan

#endif  // COLDPLAN_WARM_HPP_
