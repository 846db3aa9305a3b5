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

#include "coldplan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coldplan {

namespace {

constexpr double kTiny = 1e-12;
// Work below this is treated as finished: completion-time rounding at large
// timestamps leaves residues around ulp(t), well under a nanosecond.
constexpr Ms kCompleteTol = 1e-9;
constexpr Ms kInf = std::numeric_limits<Ms>::infinity();

double load_factor(const std::vector<LoadInterval>* load, Ms t) {
  if (!load) return 1.0;
  for (const LoadInterval& iv : *load) {
    if (t >= iv.start_ms - kTiny && t < iv.end_ms - kTiny) return 1.0 - iv.utilization;
  }
  return 1.0;
}

Ms next_load_boundary(const std::vector<LoadInterval>* load, Ms t) {
  if (!load) return kInf;
  Ms best = kInf;
  for (const LoadInterval& iv : *load) {
    if (iv.start_ms > t + kTiny) best = std::min(best, iv.start_ms);
    if (iv.end_ms > t + kTiny) best = std::min(best, iv.end_ms);
  }
  return best;
}

struct SimOp {
  enum class Status { Pending, Running, Done };
  Status status = Status::Pending;
  CoreId core = 0;
  Ms nominal = 0.0;
  Ms remaining = 0.0;
  Ms start = 0.0;
  Ms end = 0.0;
  Ms head_ready = 0.0;
  ResourceClass resource = ResourceClass::Compute;
  bool injected = false;
};

struct SimCore {
  CoreId id = 0;
  ProcessorClass cls = ProcessorClass::LittleCore;
  std::vector<int> queue;  // op keys; injected keys are graph.size() + index
  size_t next = 0;
  int running = -1;
  Ms busy = 0.0;
  const std::vector<LoadInterval>* load = nullptr;
  std::vector<int> injected;  // pending injected keys, by not_before
  size_t injected_next = 0;

  bool queue_exhausted() const { return next >= queue.size(); }
};

class Engine {
 public:
  Engine(const Plan& plan, const OperationGraph& graph, const PlatformConfig& platform,
         const SimOptions& options)
      : plan_(plan), graph_(graph), platform_(platform), options_(options) {}

  SimReport run();

 private:
  Ms nominal_duration(int key, ProcessorClass cls) const;
  const std::vector<int>& precursors(int key) const;
  bool settle(Ms t);
  bool start_ready(Ms t);
  bool try_steal(Ms t);
  bool complete_finished(Ms t);
  void check_structure() const;

  const Plan& plan_;
  const OperationGraph& graph_;
  const PlatformConfig& platform_;
  const SimOptions& options_;

  std::vector<SimCore> cores_;
  std::vector<SimOp> ops_;  // graph ops then injected ops
  std::vector<StealEvent> steals_;
  int done_count_ = 0;
  static const std::vector<int> kNoPrecursors;
};

const std::vector<int> Engine::kNoPrecursors{};

Ms Engine::nominal_duration(int key, ProcessorClass cls) const {
  if (key >= graph_.size()) {
    return options_.injected[static_cast<size_t>(key - graph_.size())].duration_ms;
  }
  const OperationNode& node = graph_.node(key);
  if (node.kind == OpKind::PipelineCreate && options_.shader_cache) return node.pipeline_hit_ms;
  return node.duration_on(cls);
}

const std::vector<int>& Engine::precursors(int key) const {
  if (key >= graph_.size()) return kNoPrecursors;
  return graph_.node(key).precursors;
}

void Engine::check_structure() const {
  std::vector<int> seen(static_cast<size_t>(graph_.size()), 0);
  auto count = [&](const std::vector<int>& queue) {
    for (int op : queue) {
      if (op < 0 || op >= graph_.size()) throw ValidationError("plan references unknown op id");
      ++seen[static_cast<size_t>(op)];
    }
  };
  count(plan_.big_queue);
  for (const auto& q : plan_.little_queues) count(q);
  for (int op = 0; op < graph_.size(); ++op) {
    if (seen[static_cast<size_t>(op)] != 1) {
      throw ValidationError("plan queues must contain every operation exactly once (op " +
                            std::to_string(op) + " appears " +
                            std::to_string(seen[static_cast<size_t>(op)]) + " times)");
    }
  }
  if (static_cast<int>(plan_.little_queues.size()) != platform_.little_cores) {
    throw ValidationError("plan has " + std::to_string(plan_.little_queues.size()) +
                          " little queues but platform declares " +
                          std::to_string(platform_.little_cores));
  }
  if (graph_.mode == Mode::Gpu) {
    for (int op : plan_.big_queue) {
      OpKind k = graph_.node(op).kind;
      if (k != OpKind::Execute && k != OpKind::Setup) {
        throw ValidationError("GPU queue may hold only setup and execute operations");
      }
    }
  }
}

bool Engine::complete_finished(Ms t) {
  std::vector<int> finished;
  for (SimCore& core : cores_) {
    if (core.running >= 0 && ops_[static_cast<size_t>(core.running)].remaining <= kCompleteTol) {
      finished.push_back(core.running);
    }
  }
  if (finished.empty()) return false;
  std::sort(finished.begin(), finished.end());  // simultaneous finishes by op id
  for (int key : finished) {
    SimOp& op = ops_[static_cast<size_t>(key)];
    op.status = SimOp::Status::Done;
    op.end = t;
    ++done_count_;
    for (SimCore& core : cores_) {
      if (core.running == key) {
        core.running = -1;
        core.busy += op.end - op.start;
        if (!core.queue_exhausted()) {
          ops_[static_cast<size_t>(core.queue[core.next])].head_ready = t;
        }
      }
    }
  }
  return true;
}

bool Engine::start_ready(Ms t) {
  bool changed = false;
  for (SimCore& core : cores_) {
    if (core.running >= 0) continue;
    if (load_factor(core.load, t) <= kTiny) continue;  // fully occupied core starts nothing
    int candidate = -1;
    if (!core.queue_exhausted()) {
      int head = core.queue[core.next];
      bool ready = true;
      for (int p : precursors(head)) {
        if (ops_[static_cast<size_t>(p)].status != SimOp::Status::Done) {
          ready = false;
          break;
        }
      }
      if (ready) candidate = head;
    } else if (core.injected_next < core.injected.size()) {
      int key = core.injected[core.injected_next];
      const InjectedOp& inj = options_.injected[static_cast<size_t>(key - graph_.size())];
      if (inj.not_before_ms <= t + kTiny) candidate = key;
    }
    if (candidate < 0) continue;

    SimOp& op = ops_[static_cast<size_t>(candidate)];
    op.status = SimOp::Status::Running;
    op.core = core.id;
    op.start = t;
    op.nominal = nominal_duration(candidate, core.cls);
    op.remaining = op.nominal;
    core.running = candidate;
    if (candidate < graph_.size()) {
      ++core.next;
    } else {
      ++core.injected_next;
    }
    changed = true;
  }
  return changed;
}

bool Engine::try_steal(Ms t) {
  // Thieves: cores with nothing left of their own. The GPU never steals
  // (preps have no GPU timing); a fully loaded core cannot run anything.
  for (SimCore& thief : cores_) {
    if (thief.cls == ProcessorClass::Gpu) continue;
    if (thief.running >= 0 || !thief.queue_exhausted()) continue;
    if (thief.injected_next < thief.injected.size()) continue;
    const double thief_factor = load_factor(thief.load, t);
    if (thief_factor <= kTiny) continue;

    int best_victim = -1;
    Ms best_remaining = -1.0;
    for (SimCore& victim : cores_) {
      if (victim.id == thief.id || victim.queue_exhausted()) continue;
      if (load_factor(victim.load, t) > thief_factor + kTiny) continue;
      int head = victim.queue[victim.next];
      const OperationNode& node = graph_.node(head);
      if (node.kind == OpKind::Execute || node.kind == OpKind::Setup) continue;
      // Whole bundles only: the head must open its layer's bundle.
      std::vector<int> bundle = graph_.bundle_ops(node.layer_index);
      if (bundle.empty() || bundle.front() != head) continue;
      if (victim.next + bundle.size() > victim.queue.size()) continue;
      bool intact = true;
      for (size_t k = 0; k < bundle.size(); ++k) {
        if (victim.queue[victim.next + k] != bundle[k]) intact = false;
      }
      if (!intact) continue;
      bool ready = true;
      for (int p : precursors(head)) {
        if (ops_[static_cast<size_t>(p)].status != SimOp::Status::Done) ready = false;
      }
      if (!ready) continue;
      // Relocation must not slow the bundle down (a stolen bundle starts
      // earlier; a slower class could still finish it later).
      Ms on_thief = 0.0, on_victim = 0.0;
      for (int op : bundle) {
        on_thief += nominal_duration(op, thief.cls);
        on_victim += nominal_duration(op, victim.cls);
      }
      if (on_thief > on_victim + kMsTolerance) continue;

      Ms remaining = 0.0;
      if (victim.running >= 0) remaining += ops_[static_cast<size_t>(victim.running)].remaining;
      for (size_t k = victim.next; k < victim.queue.size(); ++k) {
        remaining += nominal_duration(victim.queue[k], victim.cls);
      }
      if (remaining > best_remaining + kTiny) {
        best_remaining = remaining;
        best_victim = static_cast<int>(&victim - cores_.data());
      }
    }
    if (best_victim < 0) continue;

    SimCore& victim = cores_[static_cast<size_t>(best_victim)];
    int head = victim.queue[victim.next];
    std::vector<int> bundle = graph_.bundle_ops(graph_.node(head).layer_index);
    victim.queue.erase(victim.queue.begin() + static_cast<long>(victim.next),
                       victim.queue.begin() + static_cast<long>(victim.next + bundle.size()));
    for (int op : bundle) {
      thief.queue.push_back(op);
      steals_.push_back(StealEvent{op, victim.id, thief.id, t});
    }
    ops_[static_cast<size_t>(bundle.front())].head_ready = t;
    return true;  // one steal per pass; the settle loop reruns
  }
  return false;
}

bool Engine::settle(Ms t) {
  bool any = false;
  for (;;) {
    bool changed = complete_finished(t);
    if (start_ready(t)) changed = true;
    if (!changed && options_.stealing) changed = try_steal(t);
    if (!changed) break;
    any = true;
  }
  return any;
}

SimReport Engine::run() {
  platform_.validate();
  check_structure();

  const int total_ops = graph_.size() + static_cast<int>(options_.injected.size());
  ops_.assign(static_cast<size_t>(total_ops), SimOp{});
  for (int key = 0; key < graph_.size(); ++key) {
    ops_[static_cast<size_t>(key)].resource = graph_.node(key).resource_class;
  }
  for (size_t k = 0; k < options_.injected.size(); ++k) {
    SimOp& op = ops_[static_cast<size_t>(graph_.size()) + k];
    op.resource = options_.injected[k].resource_class;
    op.injected = true;
  }

  // Core order: cluster, littles, gpu.
  const bool gpu_mode = graph_.mode == Mode::Gpu;
  SimCore cluster;
  cluster.id = gpu_mode ? kGpuCore : kBigClusterCore;
  cluster.cls = gpu_mode ? ProcessorClass::Gpu : ProcessorClass::BigCluster;
  cluster.queue = plan_.big_queue;
  cores_.push_back(std::move(cluster));
  for (int j = 1; j <= platform_.little_cores; ++j) {
    SimCore little;
    little.id = j;
    little.cls = ProcessorClass::LittleCore;
    little.queue = plan_.little_queues[static_cast<size_t>(j - 1)];
    cores_.push_back(std::move(little));
  }
  for (SimCore& core : cores_) {
    auto it = platform_.background_load.find(core.id);
    if (it != platform_.background_load.end()) core.load = &it->second;
  }
  for (size_t k = 0; k < options_.injected.size(); ++k) {
    const InjectedOp& inj = options_.injected[k];
    bool placed = false;
    for (SimCore& core : cores_) {
      if (core.id == inj.core) {
        core.injected.push_back(graph_.size() + static_cast<int>(k));
        placed = true;
      }
    }
    if (!placed) throw ValidationError("injected op names an unknown core");
  }
  for (SimCore& core : cores_) {
    std::stable_sort(core.injected.begin(), core.injected.end(), [this](int a, int b) {
      return options_.injected[static_cast<size_t>(a - graph_.size())].not_before_ms <
             options_.injected[static_cast<size_t>(b - graph_.size())].not_before_ms;
    });
  }

  Ms t = 0.0;
  settle(t);
  while (done_count_ < total_ops) {
    // Piecewise-constant rates between events.
    int active_disk = 0;
    int active_mem = 0;
    for (const SimCore& core : cores_) {
      if (core.running < 0) continue;
      const SimOp& op = ops_[static_cast<size_t>(core.running)];
      if (op.resource == ResourceClass::DiskIo) ++active_disk;
      if (op.resource == ResourceClass::MemBandwidth) ++active_mem;
    }

    Ms t_next = kInf;
    for (const SimCore& core : cores_) {
      if (core.running >= 0) {
        const SimOp& op = ops_[static_cast<size_t>(core.running)];
        double rate = 1.0;
        if (op.resource == ResourceClass::DiskIo) {
          rate = std::min(1.0, platform_.disk_capacity / active_disk);
        } else if (op.resource == ResourceClass::MemBandwidth) {
          rate = std::min(1.0, platform_.mem_capacity / active_mem);
        }
        rate *= load_factor(core.load, t);
        if (rate > kTiny) t_next = std::min(t_next, t + op.remaining / rate);
      }
      if (core.running >= 0 || !core.queue_exhausted() ||
          core.injected_next < core.injected.size()) {
        t_next = std::min(t_next, next_load_boundary(core.load, t));
      }
      // A waiting injected op wakes the core at its release time.
      if (core.running < 0 && core.queue_exhausted() &&
          core.injected_next < core.injected.size()) {
        const InjectedOp& inj =
            options_.injected[static_cast<size_t>(core.injected[core.injected_next] - graph_.size())];
        if (inj.not_before_ms > t + kTiny) t_next = std::min(t_next, inj.not_before_ms);
      }
    }
    if (!std::isfinite(t_next)) {
      throw DeadlockDetected("simulation cannot make progress at t=" + std::to_string(t) +
                             " with " + std::to_string(total_ops - done_count_) +
                             " operations outstanding (circular wait in the plan)");
    }
    if (t_next <= t) {
      // Rounding swallowed the step: retire the closest-to-done op directly.
      int nearest = -1;
      for (const SimCore& core : cores_) {
        if (core.running < 0) continue;
        if (nearest < 0 || ops_[static_cast<size_t>(core.running)].remaining <
                               ops_[static_cast<size_t>(nearest)].remaining) {
          nearest = core.running;
        }
      }
      if (nearest < 0) {
        throw DeadlockDetected("simulation stalled at t=" + std::to_string(t));
      }
      ops_[static_cast<size_t>(nearest)].remaining = 0.0;
      settle(t);
      continue;
    }

    for (SimCore& core : cores_) {
      if (core.running < 0) continue;
      SimOp& op = ops_[static_cast<size_t>(core.running)];
      double rate = 1.0;
      if (op.resource == ResourceClass::DiskIo) {
        rate = std::min(1.0, platform_.disk_capacity / active_disk);
      } else if (op.resource == ResourceClass::MemBandwidth) {
        rate = std::min(1.0, platform_.mem_capacity / active_mem);
      }
      rate *= load_factor(core.load, t);
      op.remaining = std::max(0.0, op.remaining - rate * (t_next - t));
    }
    t = t_next;
    settle(t);
  }

  SimReport report;
  report.storage_overhead_bytes = plan_.storage_overhead_bytes;
  report.steals = steals_;
  for (int key = 0; key < graph_.size(); ++key) {
    const SimOp& op = ops_[static_cast<size_t>(key)];
    TimelineEntry entry;
    entry.op_id = key;
    entry.core = op.core;
    entry.start_ms = op.start;
    entry.end_ms = op.end;
    entry.stalled_ms = std::max(0.0, op.start - op.head_ready);
    entry.slowdown_factor = op.nominal > kTiny ? (op.end - op.start) / op.nominal : 1.0;
    report.timeline.push_back(entry);
  }
  for (size_t k = 0; k < options_.injected.size(); ++k) {
    const SimOp& op = ops_[static_cast<size_t>(graph_.size()) + k];
    TimelineEntry entry;
    entry.op_id = graph_.size() + static_cast<int>(k);
    entry.core = op.core;
    entry.start_ms = op.start;
    entry.end_ms = op.end;
    entry.stalled_ms = 0.0;
    entry.slowdown_factor = op.nominal > kTiny ? (op.end - op.start) / op.nominal : 1.0;
    report.injected_timeline.push_back(entry);
  }

  Ms makespan = 0.0;
  for (int sink : graph_.sink_execute_ops()) {
    makespan = std::max(makespan, ops_[static_cast<size_t>(sink)].end);
  }
  report.makespan_ms = makespan;
  for (const SimCore& core : cores_) {
    report.per_core_idle_ms[core.id] = std::max(0.0, makespan - core.busy);
  }
  return report;
}

}  // namespace

void PlatformConfig::validate() const {
  if (little_cores < 0) throw ValidationError("little_cores must be >= 0");
  if (big_cores < 1) throw ValidationError("big_cores must be >= 1");
  if (!(disk_capacity > 0.0) || !(mem_capacity > 0.0)) {
    throw ValidationError("resource capacities must be positive");
  }
  for (const auto& [core, intervals] : background_load) {
    std::vector<LoadInterval> sorted = intervals;
    std::sort(sorted.begin(), sorted.end(),
              [](const LoadInterval& a, const LoadInterval& b) { return a.start_ms < b.start_ms; });
    Ms prev_end = -kInf;
    for (const LoadInterval& iv : sorted) {
      if (iv.utilization < 0.0 || iv.utilization > 1.0) {
        throw ValidationError("load utilization must be within [0, 1]");
      }
      if (iv.end_ms < iv.start_ms) throw ValidationError("load interval ends before it starts");
      if (iv.start_ms < prev_end - kMsTolerance) {
        throw ValidationError("load intervals overlap on core " + core_name(core));
      }
      prev_end = iv.end_ms;
    }
  }
}

const TimelineEntry& SimReport::entry_for(int op_id) const {
  return timeline.at(static_cast<size_t>(op_id));
}

SimReport simulate(const Plan& plan, const OperationGraph& graph, const PlatformConfig& platform,
                   const SimOptions& options) {
  Engine engine(plan, graph, platform, options);
  return engine.run();
}

SimReport simulate_with_load(const Plan& plan, const OperationGraph& graph,
                             const PlatformConfig& platform, bool stealing) {
  if (platform.background_load.empty()) {
    throw ValidationError("simulate_with_load requires a background load trace");
  }
  SimOptions options;
  options.stealing = stealing;
  return simulate(plan, graph, platform, options);
}

SimReport simulate_gpu(const Plan& plan, const OperationGraph& graph,
                       const PlatformConfig& platform, bool shader_cache) {
  if (graph.mode != Mode::Gpu) {
    throw ModeMismatch("simulate_gpu requires a GPU-mode operation graph");
  }
  SimOptions options;
  options.shader_cache = shader_cache;
  return simulate(plan, graph, platform, options);
}

std::vector<Violation> validate_feasibility(const SimReport& report, const OperationGraph& graph,
                                            const PlatformConfig& platform) {
  std::vector<Violation> violations;

  // Coverage: every op exactly once.
  std::vector<int> count(static_cast<size_t>(graph.size()), 0);
  for (const TimelineEntry& e : report.timeline) {
    if (e.op_id >= 0 && e.op_id < graph.size()) ++count[static_cast<size_t>(e.op_id)];
  }
  for (int op = 0; op < graph.size(); ++op) {
    if (count[static_cast<size_t>(op)] != 1) {
      violations.push_back({ViolationKind::Coverage, op, -1, 0.0,
                            "op " + std::to_string(op) + " appears " +
                                std::to_string(count[static_cast<size_t>(op)]) +
                                " times in the timeline"});
    }
  }
  if (!violations.empty()) return violations;  // the remaining checks assume coverage

  // Family 1: S_i >= E_alpha for every precursor alpha.
  for (const TimelineEntry& e : report.timeline) {
    for (int p : graph.node(e.op_id).precursors) {
      const TimelineEntry& pe = report.entry_for(p);
      if (e.start_ms < pe.end_ms - kMsTolerance) {
        violations.push_back({ViolationKind::Precedence, e.op_id, p, e.start_ms,
                              "op " + std::to_string(e.op_id) + " starts at " +
                                  std::to_string(e.start_ms) + " before precursor " +
                                  std::to_string(p) + " ends at " + std::to_string(pe.end_ms)});
      }
    }
  }

  // Family 2: one op per core at a time.
  std::map<CoreId, std::vector<const TimelineEntry*>> by_core;
  for (const TimelineEntry& e : report.timeline) {
    if (e.end_ms - e.start_ms > kMsTolerance) by_core[e.core].push_back(&e);
  }
  for (const TimelineEntry& e : report.injected_timeline) {
    if (e.end_ms - e.start_ms > kMsTolerance) by_core[e.core].push_back(&e);
  }
  for (auto& [core, entries] : by_core) {
    std::sort(entries.begin(), entries.end(), [](const TimelineEntry* a, const TimelineEntry* b) {
      return a->start_ms < b->start_ms || (a->start_ms == b->start_ms && a->op_id < b->op_id);
    });
    for (size_t k = 1; k < entries.size(); ++k) {
      const TimelineEntry* prev = entries[k - 1];
      const TimelineEntry* cur = entries[k];
      if (cur->start_ms < prev->end_ms - kMsTolerance) {
        violations.push_back({ViolationKind::CoreOverlap, prev->op_id, cur->op_id, cur->start_ms,
                              "ops " + std::to_string(prev->op_id) + " and " +
                                  std::to_string(cur->op_id) + " overlap on core " +
                                  core_name(core)});
      }
    }
  }

  // Family 3: active cores never exceed M_l + M_b (the cluster counts as
  // all M_b big cores; the GPU is outside the CPU budget).
  std::vector<std::pair<Ms, int>> deltas;
  for (const TimelineEntry& e : report.timeline) {
    if (e.core == kGpuCore) continue;
    if (e.end_ms - e.start_ms <= kMsTolerance) continue;
    const int weight = e.core == kBigClusterCore ? platform.big_cores : 1;
    deltas.push_back({e.start_ms, weight});
    deltas.push_back({e.end_ms, -weight});
  }
  std::sort(deltas.begin(), deltas.end());
  int active = 0;
  for (size_t k = 0; k < deltas.size(); ++k) {
    active += deltas[k].second;
    const bool boundary = k + 1 < deltas.size() && deltas[k + 1].first == deltas[k].first;
    if (!boundary && active > platform.little_cores + platform.big_cores) {
      violations.push_back({ViolationKind::CoreBudget, -1, -1, deltas[k].first,
                            std::to_string(active) + " cores active at " +
                                std::to_string(deltas[k].first) + " exceeds M_l + M_b"});
    }
  }

  return violations;
}

}  // namespace coldplan
