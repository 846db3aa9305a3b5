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

#include <doctest.h>

#include <cmath>

#include "coldplan/oracle.hpp"
#include "test_support.hpp"

using namespace coldplan;
using namespace coldplan::testing;

TEST_CASE("sequential baseline reproduces the reference stage totals") {
  ModelProfile pixel5 = load_profile_file(fixture("pixel5_resnet50.json"));
  CHECK(std::abs(sequential_baseline(pixel5, default_combo(pixel5)) - 1363.26) < 1e-6);

  ModelProfile tx2 = load_profile_file(fixture("tx2_resnet50_gpu.json"));
  CHECK(std::abs(sequential_baseline(tx2, default_combo(tx2)) - 5467.34) < 1e-6);

  ModelProfile conv3x3 = load_profile_file(fixture("conv3x3_kernels.json"));
  std::vector<VariantScore> sgemm = {make_variant_score(conv3x3.layers[0].candidates[1], 1, false)};
  CHECK(sequential_baseline(conv3x3, sgemm) == doctest::Approx(11.05));
}

TEST_CASE("single-layer instances collapse optimal, heuristic, and sequential") {
  ModelProfile p = chain_profile(1, simple_kernel("k", 1.0, 2.0, 1.5, 3.0));
  const auto combo = forced_combo(p);
  OperationGraph g = build_operation_graph(p, combo);
  PlatformConfig platform;
  platform.little_cores = 1;
  Plan heuristic = schedule_combination(g, combo, platform);
  OracleResult opt = optimal_schedule(g, combo, platform);
  const Ms sequential = sequential_baseline(p, combo);
  CHECK(opt.makespan_ms == doctest::Approx(heuristic.predicted_makespan_ms));
  CHECK(heuristic.predicted_makespan_ms == doctest::Approx(sequential));
  CHECK(opt.optimal);
}

TEST_CASE("three-layer uniform chain: full enumeration bounds the heuristic") {
  // prep 2 ms little / 1 ms big, exec 1 ms, one little core.
  KernelVariant kv = kernel("u", 1.0, 0.5, 1.0, 0.5, 2.0, 1.0, 1.0);
  ModelProfile p = chain_profile(3, kv);
  const auto combo = forced_combo(p);
  OperationGraph g = build_operation_graph(p, combo);
  PlatformConfig platform;
  platform.little_cores = 1;

  OracleResult opt = optimal_schedule(g, combo, platform);
  Plan heuristic = schedule_combination(g, combo, platform);
  CHECK(opt.optimal);
  CHECK(opt.makespan_ms <= heuristic.predicted_makespan_ms + kMsTolerance);
  CHECK(heuristic.predicted_makespan_ms <= sequential_baseline(p, combo) + kMsTolerance);

  // The optimal placement is itself feasible under the Eq.-style checker.
  SimReport report = simulate(opt.plan, g, platform);
  CHECK(validate_feasibility(report, g, platform).empty());
  CHECK(report.makespan_ms == doctest::Approx(opt.makespan_ms));
}

TEST_CASE("sandwich property holds over many random instances") {
  int checked = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    ModelProfile p = random_profile(seed);
    const auto combo = forced_combo(p);
    OperationGraph g = build_operation_graph(p, combo);
    PlatformConfig platform;
    platform.little_cores = 1 + static_cast<int>(seed % 2);

    Plan heuristic = schedule_combination(g, combo, platform);
    OracleResult opt = optimal_schedule(g, combo, platform);
    const Ms sequential = sequential_baseline(p, combo);
    CHECK(opt.makespan_ms <= heuristic.predicted_makespan_ms + kMsTolerance);
    CHECK(heuristic.predicted_makespan_ms <= sequential + kMsTolerance);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("branch-and-bound equals plain exhaustive enumeration") {
  for (std::uint64_t seed = 1200; seed < 1230; ++seed) {
    ModelProfile p = random_profile(seed);
    const auto combo = forced_combo(p);
    OperationGraph g = build_operation_graph(p, combo);
    PlatformConfig platform;
    platform.little_cores = 2;
    OracleResult pruned = optimal_schedule(g, combo, platform, {}, /*prune=*/true);
    OracleResult plain = optimal_schedule(g, combo, platform, {}, /*prune=*/false);
    CHECK(pruned.makespan_ms == doctest::Approx(plain.makespan_ms).epsilon(1e-12));
    CHECK(pruned.states_explored <= plain.states_explored);
  }
}

TEST_CASE("oracle limits are enforced") {
  ModelProfile p = chain_profile(5, simple_kernel("k", 1.0, 1.0, 1.5, 2.0));  // 15 ops
  const auto combo = forced_combo(p);
  OperationGraph g = build_operation_graph(p, combo);
  PlatformConfig platform;
  platform.little_cores = 1;
  CHECK_THROWS_AS(optimal_schedule(g, combo, platform), LimitsExceeded);

  ModelProfile small = chain_profile(2, simple_kernel("k", 1.0, 1.0, 1.5, 2.0));
  const auto small_combo = forced_combo(small);
  OperationGraph sg = build_operation_graph(small, small_combo);
  PlatformConfig wide;
  wide.little_cores = 4;
  CHECK_THROWS_AS(optimal_schedule(sg, small_combo, wide), LimitsExceeded);
}

TEST_CASE("an exhausted time budget still returns a feasible best-found plan") {
  ModelProfile p = chain_profile(4, simple_kernel("k", 1.0, 1.0, 1.5, 2.0));
  const auto combo = forced_combo(p);
  OperationGraph g = build_operation_graph(p, combo);
  PlatformConfig platform;
  platform.little_cores = 2;
  OracleLimits limits;
  limits.time_budget_ms = 0;
  OracleResult r = optimal_schedule(g, combo, platform, limits);
  CHECK(!r.optimal);
  SimReport report = simulate(r.plan, g, platform);
  CHECK(validate_feasibility(report, g, platform).empty());
}

TEST_CASE("random_profile is deterministic per seed") {
  for (std::uint64_t seed : {1ull, 42ull, 999ull}) {
    CHECK(serialize_profile(random_profile(seed)) == serialize_profile(random_profile(seed)));
  }
}

TEST_CASE("the oracle also bounds GPU-mode plans") {
  ModelProfile p;
  p.mode = Mode::Gpu;
  p.model_name = "gpu-oracle";
  p.setup.memory_alloc_ms = 0.0;
  p.setup.gpu_driver_init_ms = 1.0;
  KernelVariant kv = simple_kernel("k", 1.0, 1.0, 1.5, 2.0);
  kv.pipeline_create_miss_ms = 0.5;
  p.layers.push_back(layer(1, {}, {kv}));
  p.layers.push_back(layer(2, {1}, {kv}));

  const auto combo = forced_combo(p);
  OperationGraph g = build_operation_graph(p, combo);
  PlatformConfig platform;
  platform.little_cores = 2;
  Plan heuristic = schedule_combination(g, combo, platform);
  OracleResult opt = optimal_schedule(g, combo, platform);
  CHECK(opt.makespan_ms <= heuristic.predicted_makespan_ms + kMsTolerance);
  CHECK(heuristic.predicted_makespan_ms <= sequential_baseline(p, combo) + kMsTolerance);
  // No prep ever lands on the GPU queue.
  for (int op : opt.plan.big_queue) {
    const OpKind kind = g.node(op).kind;
    CHECK((kind == OpKind::Execute || kind == OpKind::Setup));
  }
}
