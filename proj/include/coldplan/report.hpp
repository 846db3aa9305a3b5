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

#ifndef COLDPLAN_REPORT_HPP_
#define COLDPLAN_REPORT_HPP_

#include <iosfwd>
#include <string>

#include "coldplan/scheduler.hpp"
#include "coldplan/simulator.hpp"
#include "coldplan/warm.hpp"

namespace coldplan {

// Plan document: {combo:[{layer,kernel,cached}], queues:{big, little},
// predicted_makespan_ms, storage_overhead_bytes}.
std::string plan_to_json(const Plan& plan);

// Summary: makespan, per-stage totals, idle per core, steals.
std::string report_summary_json(const SimReport& report, const OperationGraph& graph);

std::string warm_switch_to_json(const WarmSwitchPlan& wsp, Ms second_ms, Ms warm_sum_ms);

// Gantt CSV: op_id,layer,kind,core,start_ms,end_ms,stalled_ms,slowdown —
// rows ordered by (start_ms, op_id), bit-stable across runs.
void write_gantt_csv(std::ostream& out, const SimReport& report, const OperationGraph& graph);

struct AblationResult {
  Ms baseline_ms = 0.0;  // default kernels, no cache, sequential
  Ms k_ms = 0.0;         // selected kernels, no cache, sequential
  Ms kc_ms = 0.0;        // selected kernels + cache (and shader cache), sequential
  Ms kcp_ms = 0.0;       // full pipelined plan, simulated
};

AblationResult run_ablation(const ModelProfile& profile, const PlatformConfig& platform,
                            const SchedulerConfig& cfg = {});

std::string ablation_to_json(const AblationResult& result);

// Background-load trace document: {"<core>": [[start_ms, end_ms, utilization], ...]}
// with core keys "0" (big cluster), "1".."M" (little cores), or "gpu".
std::map<CoreId, std::vector<LoadInterval>> load_trace_from_json(const std::string& text);
std::map<CoreId, std::vector<LoadInterval>> load_trace_from_file(const std::string& path);

}  // namespace coldplan

#endif  // COLDPLAN_REPORT_HPP_
