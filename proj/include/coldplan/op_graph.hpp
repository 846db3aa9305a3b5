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

#ifndef COLDPLAN_OP_GRAPH_HPP_
#define COLDPLAN_OP_GRAPH_HPP_

#include <string>
#include <vector>

#include "coldplan/candidates.hpp"
#include "coldplan/profile.hpp"
#include "coldplan/types.hpp"

namespace coldplan {

enum class OpKind { Read, Transform, PipelineCreate, Execute, Setup };

enum class ResourceClass { DiskIo, MemBandwidth, Compute };

inline const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::Read: return "read";
    case OpKind::Transform: return "transform";
    case OpKind::PipelineCreate: return "pipeline_create";
    case OpKind::Execute: return "execute";
    case OpKind::Setup: return "setup";
  }
  return "?";
}

inline ResourceClass resource_class_of(OpKind k) {
  switch (k) {
    case OpKind::Read: return ResourceClass::DiskIo;
    case OpKind::Transform: return ResourceClass::MemBandwidth;
    default: return ResourceClass::Compute;
  }
}

struct OperationNode {
  int op_id = -1;
  int layer_index = 0;  // 0 for Setup nodes
  OpKind kind = OpKind::Read;
  ResourceClass resource_class = ResourceClass::Compute;
  Ms little_ms = 0.0;
  Ms big_ms = 0.0;
  Ms gpu_ms = 0.0;
  // Shader-cache-hit duration of a PipelineCreate node; the default
  // little/big values carry the miss cost.
  Ms pipeline_hit_ms = 0.0;
  std::vector<int> precursors;  // Θ_i, sorted

  Ms duration_on(ProcessorClass c) const {
    switch (c) {
      case ProcessorClass::LittleCore: return little_ms;
      case ProcessorClass::BigCluster: return big_ms;
      case ProcessorClass::Gpu: return gpu_ms;
    }
    return 0.0;
  }
};

// The expanded operation DAG for one chosen kernel combination:
// per layer Read -> (Transform) -> Execute, Execute->Execute edges from the
// model DAG, plus Setup and PipelineCreate machinery in GPU mode.
struct OperationGraph {
  std::vector<OperationNode> nodes;  // op_id == index
  int layer_count = 0;               // N
  Mode mode = Mode::Cpu;

  int setup_alloc_op = -1;
  int setup_driver_op = -1;
  // Per-layer op ids, index 0 unused; -1 where the node does not exist.
  std::vector<int> read_op;
  std::vector<int> transform_op;
  std::vector<int> pipeline_op;
  std::vector<int> execute_op;

  int size() const { return static_cast<int>(nodes.size()); }
  const OperationNode& node(int op_id) const { return nodes.at(static_cast<size_t>(op_id)); }

  // The prep bundle of a layer: its non-Execute ops in queue order
  // (read, transform, pipeline-create), scheduled as one unit.
  std::vector<int> bundle_ops(int layer) const;
  Ms bundle_ms(int layer, ProcessorClass c) const;

  // Execute ops with no Execute successor.
  std::vector<int> sink_execute_ops() const;

  // Raises ValidationError if a cycle exists; otherwise a topological order.
  std::vector<int> topological_order() const;
};

// Expands profile + combo into the operation graph. The combo must select
// exactly one variant per layer (index = layer - 1); cache semantics are
// applied to durations and Transform nodes are omitted for cached layers.
OperationGraph build_operation_graph(const ModelProfile& profile,
                                     const std::vector<VariantScore>& combo);

}  // namespace coldplan

#endif  // COLDPLAN_OP_GRAPH_HPP_
