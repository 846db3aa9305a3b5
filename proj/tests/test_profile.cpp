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

#include <set>

#include "coldplan/op_graph.hpp"
#include "coldplan/oracle.hpp"
#include "coldplan/profile.hpp"
#include "test_support.hpp"

using namespace coldplan;
using namespace coldplan::testing;

namespace {

const char* kMinimalDoc = R"({
  "model": "mini", "mode": "cpu", "setup": {"memory_alloc_ms": 0.0},
  "layers": [
    {"index": 1, "op": "conv", "preds": [],
     "kernels": [{"id": "k0",
       "costs": {"read_raw_ms": {"little": 1.0, "big": 1.0},
                 "read_cached_ms": {"little": 1.5, "big": 1.5},
                 "transform_ms": {"little": 2.0, "big": 2.0},
                 "execute_ms": {"big": 3.0}},
       "bytes": {"raw": 10, "cached": 20}}]}
  ]
})";

}  // namespace

TEST_CASE("minimal one-layer CPU document loads") {
  ModelProfile p = load_profile_string(kMinimalDoc);
  CHECK(p.layer_count() == 1);
  CHECK(p.mode == Mode::Cpu);
  CHECK(p.layers[0].candidates.size() == 1);
  CHECK(p.layers[0].candidates[0].execute_ms == doctest::Approx(3.0));
}

TEST_CASE("conv3x3 fixture carries the reference kernel costs") {
  ModelProfile p = load_profile_file(fixture("conv3x3_kernels.json"));
  REQUIRE(p.layer_count() == 1);
  const auto& ks = p.layers[0].candidates;
  REQUIRE(ks.size() == 6);

  const double transforms[] = {38.23, 2.21, 2.22, 65.67, 0.0, 0.0};
  const double cached[] = {5.23, 0.70, 0.70, 4.12, 0.70, 0.70};
  const double executes[] = {2.98, 8.14, 18.63, 3.37, 8.01, 87.12};
  for (size_t i = 0; i < 6; ++i) {
    CHECK(ks[i].read_raw_ms.little == doctest::Approx(0.70));
    CHECK(ks[i].transform_ms.little == doctest::Approx(transforms[i]));
    CHECK(ks[i].read_cached_ms.little == doctest::Approx(cached[i]));
    CHECK(ks[i].execute_ms == doctest::Approx(executes[i]));
  }
  CHECK(ks[0].kernel_id == "3x3s1-winograd-pack4");
  CHECK(ks[4].kernel_id == "3x3s1");
}

TEST_CASE("dangling predecessor is rejected") {
  std::string doc = R"({
    "model": "bad", "mode": "cpu", "setup": {"memory_alloc_ms": 0.0},
    "layers": [
      {"index": 1, "op": "a", "preds": [], "kernels": [{"id": "k",
        "costs": {"read_raw_ms": {"little": 1, "big": 1},
                  "read_cached_ms": {"little": 1, "big": 1},
                  "transform_ms": {"little": 0, "big": 0},
                  "execute_ms": {"big": 1}}}]},
      {"index": 2, "op": "b", "preds": [5], "kernels": [{"id": "k",
        "costs": {"read_raw_ms": {"little": 1, "big": 1},
                  "read_cached_ms": {"little": 1, "big": 1},
                  "transform_ms": {"little": 0, "big": 0},
                  "execute_ms": {"big": 1}}}]}
    ]
  })";
  CHECK_THROWS_AS(load_profile_string(doc), ValidationError);
}

TEST_CASE("load_profile error paths") {
  CHECK_THROWS_AS(load_profile_string("{nonsense"), ParseError);

  SUBCASE("negative duration") {
    std::string doc = kMinimalDoc;
    const auto at = doc.find("\"little\": 1.0");
    doc.replace(at, 13, "\"little\": -1.0");
    CHECK_THROWS_AS(load_profile_string(doc), ValidationError);
  }
  SUBCASE("empty kernel list") {
    std::string doc = R"({"model": "x", "mode": "cpu", "setup": {"memory_alloc_ms": 0},
      "layers": [{"index": 1, "op": "a", "preds": [], "kernels": []}]})";
    CHECK_THROWS_AS(load_profile_string(doc), ValidationError);
  }
  SUBCASE("duplicate kernel ids") {
    std::string doc = R"({"model": "x", "mode": "cpu", "setup": {"memory_alloc_ms": 0},
      "layers": [{"index": 1, "op": "a", "preds": [], "kernels": [
        {"id": "k", "costs": {"read_raw_ms": {"little": 1, "big": 1},
          "read_cached_ms": {"little": 1, "big": 1},
          "transform_ms": {"little": 0, "big": 0}, "execute_ms": {"big": 1}}},
        {"id": "k", "costs": {"read_raw_ms": {"little": 1, "big": 1},
          "read_cached_ms": {"little": 1, "big": 1},
          "transform_ms": {"little": 0, "big": 0}, "execute_ms": {"big": 2}}}
      ]}]})";
    CHECK_THROWS_AS(load_profile_string(doc), ValidationError);
  }
  SUBCASE("unknown fields rejected unless lenient") {
    std::string doc = kMinimalDoc;
    doc.insert(doc.find("\"model\""), "\"vendor\": \"x\", ");
    CHECK_THROWS_AS(load_profile_string(doc), ParseError);
    CHECK_NOTHROW(load_profile_string(doc, /*lenient=*/true));
  }
  SUBCASE("zero-transform kernel must keep cached read equal to raw") {
    std::string doc = R"({"model": "x", "mode": "cpu", "setup": {"memory_alloc_ms": 0},
      "layers": [{"index": 1, "op": "a", "preds": [], "kernels": [
        {"id": "k", "costs": {"read_raw_ms": {"little": 1, "big": 1},
          "read_cached_ms": {"little": 2, "big": 2},
          "transform_ms": {"little": 0, "big": 0}, "execute_ms": {"big": 1}}}
      ]}]})";
    CHECK_THROWS_AS(load_profile_string(doc), ValidationError);
  }
  SUBCASE("gpu driver setup is GPU-mode only") {
    std::string doc = kMinimalDoc;
    const std::string alloc = "\"memory_alloc_ms\": 0.0";
    doc.replace(doc.find(alloc), alloc.size(), alloc + ", \"gpu_driver_init_ms\": 5.0");
    CHECK_THROWS_AS(load_profile_string(doc), ValidationError);
  }
}

TEST_CASE("profiles round-trip through serialization") {
  for (const char* name : {"conv3x3_kernels.json", "pixel5_resnet50.json", "tx2_resnet50_gpu.json",
                           "pipeline6.json", "ablation_synthetic.json"}) {
    ModelProfile p = load_profile_file(fixture(name));
    ModelProfile q = load_profile_string(serialize_profile(p));
    CHECK(p == q);
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ModelProfile p = random_profile(seed);
    CHECK(p == load_profile_string(serialize_profile(p)));
  }
}

TEST_CASE("operation graph: single uncached layer is a 3-node chain") {
  ModelProfile p = chain_profile(1, simple_kernel("k", 1.0, 2.0, 1.5, 3.0));
  OperationGraph g = build_operation_graph(p, forced_combo(p));
  REQUIRE(g.size() == 3);
  const int r = g.read_op[1], w = g.transform_op[1], e = g.execute_op[1];
  CHECK(g.node(r).precursors.empty());
  CHECK(g.node(w).precursors == std::vector<int>{r});
  CHECK(g.node(e).precursors == std::vector<int>{w});
  CHECK(g.node(r).resource_class == ResourceClass::DiskIo);
  CHECK(g.node(w).resource_class == ResourceClass::MemBandwidth);
  CHECK(g.node(e).resource_class == ResourceClass::Compute);
}

TEST_CASE("operation graph: single cached GPU layer") {
  ModelProfile p;
  p.model_name = "gpu1";
  p.mode = Mode::Gpu;
  p.setup.memory_alloc_ms = 0.0;
  p.setup.gpu_driver_init_ms = 10.0;
  KernelVariant kv = simple_kernel("k", 1.0, 4.0, 2.0, 3.0);
  kv.pipeline_create_hit_ms = 0.5;
  kv.pipeline_create_miss_ms = 2.5;
  p.layers.push_back(layer(1, {}, {kv}));

  OperationGraph g = build_operation_graph(p, forced_combo(p, /*cached=*/true));
  REQUIRE(g.size() == 4);  // driver setup, read, pipeline-create, execute
  CHECK(g.setup_driver_op >= 0);
  CHECK(g.setup_alloc_op == -1);
  CHECK(g.transform_op[1] == -1);
  const int e = g.execute_op[1];
  std::set<int> pre(g.node(e).precursors.begin(), g.node(e).precursors.end());
  CHECK(pre == std::set<int>{g.read_op[1], g.pipeline_op[1]});
  CHECK(g.node(g.pipeline_op[1]).precursors == std::vector<int>{g.setup_driver_op});
  // cache semantics: the read carries the cached cost
  CHECK(g.node(g.read_op[1]).little_ms == doctest::Approx(2.0));
}

TEST_CASE("operation graph: 3-layer chain edges match the hand-drawn DAG") {
  ModelProfile p = chain_profile(3, simple_kernel("k", 1.0, 2.0, 1.5, 3.0));
  OperationGraph g = build_operation_graph(p, forced_combo(p));
  REQUIRE(g.size() == 9);
  for (int i = 2; i <= 3; ++i) {
    std::set<int> pre(g.node(g.execute_op[i]).precursors.begin(),
                      g.node(g.execute_op[i]).precursors.end());
    CHECK(pre == std::set<int>{g.transform_op[i], g.execute_op[i - 1]});
  }
  CHECK(g.node(g.execute_op[1]).precursors == std::vector<int>{g.transform_op[1]});
  CHECK_NOTHROW(g.topological_order());
}

TEST_CASE("operation graph node counts and acyclicity on random profiles") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    ModelProfile p = random_profile(seed);
    const auto combo = forced_combo(p);
    OperationGraph g = build_operation_graph(p, combo);
    const int setup_count = (g.setup_alloc_op >= 0 ? 1 : 0) + (g.setup_driver_op >= 0 ? 1 : 0);
    CHECK(g.size() == 3 * p.layer_count() + setup_count);
    CHECK_NOTHROW(g.topological_order());
    for (int sink : g.sink_execute_ops()) {
      CHECK(g.node(sink).kind == OpKind::Execute);
    }

    // Executes of non-source layers have at least two precursors (their
    // prep plus every predecessor execution), and every execute is
    // reachable from its layer's read.
    for (int i = 1; i <= p.layer_count(); ++i) {
      const OperationNode& e = g.node(g.execute_op[static_cast<size_t>(i)]);
      if (!p.layer(i).predecessors.empty()) CHECK(e.precursors.size() >= 2);
      std::vector<int> stack = {e.op_id};
      bool reaches_read = false;
      while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (g.node(id).kind == OpKind::Read) reaches_read = true;
        for (int pr : g.node(id).precursors) stack.push_back(pr);
      }
      CHECK(reaches_read);
    }
  }
}

TEST_CASE("cached layers drop their transform node and add storage") {
  KernelVariant kv = simple_kernel("k", 1.0, 2.0, 1.5, 3.0);
  kv.cached_bytes = 777;
  ModelProfile p = chain_profile(3, kv);
  auto combo = forced_combo(p);
  combo[1] = make_variant_score(kv, 0, /*cached=*/true);  // cache layer 2 only

  OperationGraph g = build_operation_graph(p, combo);
  CHECK(g.size() == 8);  // 3N minus one transform
  CHECK(g.transform_op[2] == -1);
  CHECK(g.transform_op[1] >= 0);
  std::set<int> pre(g.node(g.execute_op[2]).precursors.begin(),
                    g.node(g.execute_op[2]).precursors.end());
  CHECK(pre == std::set<int>{g.read_op[2], g.execute_op[1]});

  PlatformConfig platform;
  platform.little_cores = 1;
  Plan plan = schedule_combination(g, combo, platform);
  CHECK(plan.storage_overhead_bytes == 777);
}

TEST_CASE("multiple sinks are allowed") {
  ModelProfile p;
  p.model_name = "fork";
  p.mode = Mode::Cpu;
  KernelVariant kv = simple_kernel("k", 1.0, 0.0, 1.0, 2.0);
  p.layers.push_back(layer(1, {}, {kv}));
  p.layers.push_back(layer(2, {1}, {kv}));
  p.layers.push_back(layer(3, {1}, {kv}));
  CHECK(p.sink_layers() == std::vector<int>{2, 3});

  OperationGraph g = build_operation_graph(p, forced_combo(p));
  CHECK(g.sink_execute_ops().size() == 2);
}

TEST_CASE("execute_ms must use the mode's processor class") {
  std::string doc = kMinimalDoc;
  const std::string exec = "\"execute_ms\": {\"big\": 3.0}";
  doc.replace(doc.find(exec), exec.size(), "\"execute_ms\": {\"gpu\": 3.0}");
  CHECK_THROWS_AS(load_profile_string(doc), ParseError);
}
