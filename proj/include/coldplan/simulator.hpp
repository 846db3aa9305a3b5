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

#ifndef COLDPLAN_SIMULATOR_HPP_
#define COLDPLAN_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coldplan/op_graph.hpp"
#include "coldplan/scheduler.hpp"
#include "coldplan/types.hpp"

namespace coldplan {

struct TimelineEntry {
  int op_id = -1;
  CoreId core = 0;
  Ms start_ms = 0.0;    // S_{i,j}
  Ms end_ms = 0.0;      // E_i
  Ms stalled_ms = 0.0;  // wait on precursors after reaching the queue head
  double slowdown_factor = 1.0;
};

struct StealEvent {
  int op_id = -1;
  CoreId from_core = 0;
  CoreId to_core = 0;
  Ms time_ms = 0.0;
};

// A warm-switch prep placed into an idle window of the cold timeline.
struct InjectedOp {
  int layer = 0;
  OpKind kind = OpKind::Read;
  ResourceClass resource_class = ResourceClass::DiskIo;
  CoreId core = 0;
  Ms not_before_ms = 0.0;
  Ms duration_ms = 0.0;
};

struct SimReport {
  Ms makespan_ms = 0.0;  // end of the last sink execution
  std::vector<TimelineEntry> timeline;
  std::map<CoreId, Ms> per_core_idle_ms;
  std::vector<StealEvent> steals;
  std::uint64_t storage_overhead_bytes = 0;
  std::vector<TimelineEntry> injected_timeline;  // indexes into SimOptions::injected

  const TimelineEntry& entry_for(int op_id) const;
};

struct SimOptions {
  bool stealing = false;
  bool shader_cache = false;  // GPU: pipeline creation uses hit costs
  std::vector<InjectedOp> injected;
};

// Fluid-rate discrete-event simulation of a plan. Each core runs its queue
// in order; an op starts when it is at the head and every precursor has
// finished. DiskIo ops progress at min(1, disk_capacity / n_active_disk),
// MemBandwidth at min(1, mem_capacity / n_active_mem), Compute at 1, all
// scaled by (1 - background utilization); rates are recomputed at every
// start/finish/load-boundary event. Throws DeadlockDetected on circular wait.
SimReport simulate(const Plan& plan, const OperationGraph& graph, const PlatformConfig& platform,
                   const SimOptions& options = {});

// Background-load-aware run; requires a load trace in the platform.
SimReport simulate_with_load(const Plan& plan, const OperationGraph& graph,
                             const PlatformConfig& platform, bool stealing);

// GPU-mode run; throws ModeMismatch on a CPU graph.
SimReport simulate_gpu(const Plan& plan, const OperationGraph& graph,
                       const PlatformConfig& platform, bool shader_cache);

enum class ViolationKind { Precedence, CoreOverlap, CoreBudget, Coverage };

struct Violation {
  ViolationKind kind = ViolationKind::Precedence;
  int op_a = -1;
  int op_b = -1;
  Ms at_ms = 0.0;
  std::string detail;
};

// Independent checker for the three scheduling constraint families
// (precedence, single op per core, total core budget) plus coverage.
// Empty result == feasible timeline.
std::vector<Violation> validate_feasibility(const SimReport& report, const OperationGraph& graph,
                                            const PlatformConfig& platform);

}  // namespace coldplan

#endif  // COLDPLAN_SIMULATOR_HPP_
