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

#include "coldplan/op_graph.hpp"

#include <algorithm>
#include <queue>

namespace coldplan {

std::vector<int> OperationGraph::bundle_ops(int layer) const {
  std::vector<int> ops;
  if (read_op[static_cast<size_t>(layer)] >= 0) ops.push_back(read_op[static_cast<size_t>(layer)]);
  if (transform_op[static_cast<size_t>(layer)] >= 0) {
    ops.push_back(transform_op[static_cast<size_t>(layer)]);
  }
  if (pipeline_op[static_cast<size_t>(layer)] >= 0) {
    ops.push_back(pipeline_op[static_cast<size_t>(layer)]);
  }
  return ops;
}

Ms OperationGraph::bundle_ms(int layer, ProcessorClass c) const {
  Ms total = 0.0;
  for (int op : bundle_ops(layer)) total += node(op).duration_on(c);
  return total;
}

std::vector<int> OperationGraph::sink_execute_ops() const {
  std::vector<bool> has_exec_successor(nodes.size(), false);
  for (const OperationNode& n : nodes) {
    if (n.kind != OpKind::Execute) continue;
    for (int p : n.precursors) {
      if (node(p).kind == OpKind::Execute) has_exec_successor[static_cast<size_t>(p)] = true;
    }
  }
  std::vector<int> sinks;
  for (const OperationNode& n : nodes) {
    if (n.kind == OpKind::Execute && !has_exec_successor[static_cast<size_t>(n.op_id)]) {
      sinks.push_back(n.op_id);
    }
  }
  return sinks;
}

std::vector<int> OperationGraph::topological_order() const {
  std::vector<int> indegree(nodes.size(), 0);
  std::vector<std::vector<int>> successors(nodes.size());
  for (const OperationNode& n : nodes) {
    for (int p : n.precursors) {
      successors[static_cast<size_t>(p)].push_back(n.op_id);
      ++indegree[static_cast<size_t>(n.op_id)];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (const OperationNode& n : nodes) {
    if (indegree[static_cast<size_t>(n.op_id)] == 0) ready.push(n.op_id);
  }
  std::vector<int> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    int id = ready.top();
    ready.pop();
    order.push_back(id);
    for (int s : successors[static_cast<size_t>(id)]) {
      if (--indegree[static_cast<size_t>(s)] == 0) ready.push(s);
    }
  }
  if (order.size() != nodes.size()) {
    throw ValidationError("operation graph contains a cycle");
  }
  return order;
}

OperationGraph build_operation_graph(const ModelProfile& profile,
                                     const std::vector<VariantScore>& combo) {
  const int n = profile.layer_count();
  if (static_cast<int>(combo.size()) != n) {
    throw ValidationError("combo must select exactly one variant per layer");
  }

  OperationGraph graph;
  graph.layer_count = n;
  graph.mode = profile.mode;
  graph.read_op.assign(static_cast<size_t>(n) + 1, -1);
  graph.transform_op.assign(static_cast<size_t>(n) + 1, -1);
  graph.pipeline_op.assign(static_cast<size_t>(n) + 1, -1);
  graph.execute_op.assign(static_cast<size_t>(n) + 1, -1);

  auto add_node = [&graph](OpKind kind, int layer, Ms little, Ms big, Ms gpu) -> int {
    OperationNode node;
    node.op_id = graph.size();
    node.layer_index = layer;
    node.kind = kind;
    node.resource_class = resource_class_of(kind);
    node.little_ms = little;
    node.big_ms = big;
    node.gpu_ms = gpu;
    graph.nodes.push_back(std::move(node));
    return graph.nodes.back().op_id;
  };

  if (profile.setup.memory_alloc_ms > 0.0) {
    const Ms d = profile.setup.memory_alloc_ms;
    graph.setup_alloc_op = add_node(OpKind::Setup, 0, d, d, d);
  }
  if (profile.mode == Mode::Gpu && profile.setup.gpu_driver_init_ms > 0.0) {
    const Ms d = profile.setup.gpu_driver_init_ms;
    graph.setup_driver_op = add_node(OpKind::Setup, 0, d, d, d);
  }

  for (int i = 1; i <= n; ++i) {
    const KernelVariant& kv = combo[static_cast<size_t>(i - 1)].variant;

    const CostPair& read = kv.cached ? kv.read_cached_ms : kv.read_raw_ms;
    int read_id = add_node(OpKind::Read, i, read.little, read.big, 0.0);
    graph.read_op[static_cast<size_t>(i)] = read_id;
    if (graph.setup_alloc_op >= 0) {
      graph.nodes[static_cast<size_t>(read_id)].precursors.push_back(graph.setup_alloc_op);
    }

    int transform_id = -1;
    if (!kv.cached) {
      transform_id = add_node(OpKind::Transform, i, kv.transform_ms.little, kv.transform_ms.big, 0.0);
      graph.transform_op[static_cast<size_t>(i)] = transform_id;
      graph.nodes[static_cast<size_t>(transform_id)].precursors.push_back(read_id);
    }

    int pipeline_id = -1;
    if (profile.mode == Mode::Gpu) {
      const Ms miss = kv.pipeline_create_miss_ms;
      pipeline_id = add_node(OpKind::PipelineCreate, i, miss, miss, miss);
      graph.nodes[static_cast<size_t>(pipeline_id)].pipeline_hit_ms = kv.pipeline_create_hit_ms;
      graph.pipeline_op[static_cast<size_t>(i)] = pipeline_id;
      if (graph.setup_driver_op >= 0) {
        graph.nodes[static_cast<size_t>(pipeline_id)].precursors.push_back(graph.setup_driver_op);
      }
    }

    const Ms exec = kv.execute_ms;
    int exec_id = profile.mode == Mode::Cpu ? add_node(OpKind::Execute, i, 0.0, exec, 0.0)
                                            : add_node(OpKind::Execute, i, 0.0, 0.0, exec);
    graph.execute_op[static_cast<size_t>(i)] = exec_id;
    auto& exec_pre = graph.nodes[static_cast<size_t>(exec_id)].precursors;
    exec_pre.push_back(transform_id >= 0 ? transform_id : read_id);
    if (pipeline_id >= 0) exec_pre.push_back(pipeline_id);
    for (int pred : profile.layer(i).predecessors) {
      exec_pre.push_back(graph.execute_op[static_cast<size_t>(pred)]);
    }
    std::sort(exec_pre.begin(), exec_pre.end());
  }

  return graph;
}

}  // namespace coldplan
