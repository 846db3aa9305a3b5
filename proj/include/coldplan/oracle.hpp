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

#ifndef COLDPLAN_ORACLE_HPP_
#define COLDPLAN_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "coldplan/scheduler.hpp"
#include "coldplan/simulator.hpp"

namespace coldplan {

struct OracleLimits {
  int max_ops = 12;
  int max_cores = 3;  // cluster + little cores
  int time_budget_ms = 10000;
};

// The vanilla cold path: setup + sum of preparation + sum of execution,
// no overlap. Preparation is charged at big-core rates (the stock engine
// runs on the big cores).
Ms sequential_baseline(const ModelProfile& profile, const std::vector<VariantScore>& combo);

struct OracleResult {
  Plan plan;
  Ms makespan_ms = 0.0;
  bool optimal = true;  // false when the time budget cut the search short
  std::uint64_t states_explored = 0;
};

// Exhaustive search over prep-bundle placements: every assignment of each
// bundle to the Q_0 header or a little core, in every per-queue order, with
// executes fixed on the cluster in layer order. Each complete placement is
// scored with the simulator (contention on). Throws LimitsExceeded when the
// instance exceeds the limits.
OracleResult optimal_schedule(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                              const PlatformConfig& platform, const OracleLimits& limits = {},
                              bool prune = true);

struct RandomInstanceOptions {
  int min_layers = 1;
  int max_layers = 4;
  int max_kernels = 2;
  bool chain_only = false;  // otherwise random DAGs
};

// Seed-deterministic toy instances for the oracle harness and property
// suites (memory_alloc is zero so N=4 stays within the default op limit).
ModelProfile random_profile(std::uint64_t seed, const RandomInstanceOptions& options = {});

}  // namespace coldplan

#endif  // COLDPLAN_ORACLE_HPP_
