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

#ifndef COLDPLAN_SCHEDULER_HPP_
#define COLDPLAN_SCHEDULER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coldplan/candidates.hpp"
#include "coldplan/op_graph.hpp"
#include "coldplan/profile.hpp"
#include "coldplan/types.hpp"

namespace coldplan {

struct LoadInterval {
  Ms start_ms = 0.0;
  Ms end_ms = 0.0;
  double utilization = 0.0;  // fraction of the core consumed, in [0, 1]
};

struct PlatformConfig {
  int little_cores = 2;  // M_l
  int big_cores = 4;     // M_b; the cluster is one schedulable resource
  double disk_capacity = 1.5;
  double mem_capacity = 3.0;
  std::map<CoreId, std::vector<LoadInterval>> background_load;

  void validate() const;  // throws ValidationError
};

// A selected kernel combination plus per-core operation queues.
struct Plan {
  std::vector<VariantScore> combo;              // K_c, index = layer - 1
  std::vector<int> big_queue;                   // Q_0: setups, header preps, executes
  std::vector<std::vector<int>> little_queues;  // Q_1..Q_{M_l}
  Ms predicted_makespan_ms = 0.0;
  std::uint64_t storage_overhead_bytes = 0;
  // Set when the balance loops hit the iteration guard; the plan is still valid.
  bool balance_guard_hit = false;
};

enum class ComboStrategy { Exhaustive, Greedy, Beam };

struct SchedulerConfig {
  Ms epsilon_ms = 0.0;        // <= 0 selects max(0.1, 1% of current max queue time)
  int max_balance_iters = 0;  // <= 0 selects 16 * N
  ComboStrategy strategy = ComboStrategy::Exhaustive;
  int beam_width = 8;
  int combo_cap = 4096;
  bool allow_cache = true;
  bool shader_cache = false;  // GPU scoring uses pipeline hit costs
};

// Queue completion time: the sum of operation durations at the given class.
// Dependency stalls are ignored here; the simulator accounts for them.
Ms compute_queue_time(const std::vector<int>& queue, ProcessorClass cls,
                      const OperationGraph& graph);

// Balances one kernel combination across the cluster and little cores.
Plan schedule_combination(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                          const PlatformConfig& platform, const SchedulerConfig& cfg = {});

// The no-pipelining plan. CPU mode: everything in Q_0 (setups, all prep
// bundles in layer order, then all executes). GPU mode: Q_0 keeps only
// setups + executes and all bundles chain on little core 1.
Plan sequential_plan(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                     int little_queue_count);

// Explores the kernel-combination space (per-layer Pareto fronts), scores
// each scheduled combination with the simulator, and returns the argmin.
// Ties break toward lower storage overhead, then declaration order.
Plan generate_plan(const ModelProfile& profile, const PlatformConfig& platform,
                   const SchedulerConfig& cfg = {});

// Per-layer Pareto fronts as generate_plan sees them (CLI --explain).
std::vector<std::vector<VariantScore>> candidate_fronts(const ModelProfile& profile,
                                                        bool allow_cache = true);

// The first-declared kernel per layer, uncached: the vanilla engine's choice.
std::vector<VariantScore> default_combo(const ModelProfile& profile);

}  // namespace coldplan

#endif  // COLDPLAN_SCHEDULER_HPP_
