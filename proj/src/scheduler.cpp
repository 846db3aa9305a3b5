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

#include "coldplan/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coldplan/simulator.hpp"

namespace coldplan {

namespace {

Ms epsilon_for(const SchedulerConfig& cfg, Ms current_max) {
  if (cfg.epsilon_ms > 0.0) return cfg.epsilon_ms;
  return std::max(0.1, 0.01 * current_max);
}

std::uint64_t combo_storage(const std::vector<VariantScore>& combo) {
  std::uint64_t bytes = 0;
  for (const VariantScore& v : combo) bytes += v.storage_overhead_bytes();
  return bytes;
}

// Assembles queues from a header/littles layer assignment and fills the
// plan's simulated makespan.
Plan assemble_plan(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                   const std::vector<int>& header_layers,
                   const std::vector<std::vector<int>>& little_layers,
                   const PlatformConfig& platform, const SchedulerConfig& cfg, bool guard_hit) {
  Plan plan;
  plan.combo = combo;
  plan.balance_guard_hit = guard_hit;
  plan.storage_overhead_bytes = combo_storage(combo);

  if (graph.setup_alloc_op >= 0) plan.big_queue.push_back(graph.setup_alloc_op);
  if (graph.setup_driver_op >= 0) plan.big_queue.push_back(graph.setup_driver_op);
  for (int layer : header_layers) {
    for (int op : graph.bundle_ops(layer)) plan.big_queue.push_back(op);
  }
  for (int i = 1; i <= graph.layer_count; ++i) {
    plan.big_queue.push_back(graph.execute_op[static_cast<size_t>(i)]);
  }
  plan.little_queues.resize(static_cast<size_t>(platform.little_cores));
  for (size_t j = 0; j < little_layers.size(); ++j) {
    for (int layer : little_layers[j]) {
      for (int op : graph.bundle_ops(layer)) plan.little_queues[j].push_back(op);
    }
  }
  SimOptions options;
  options.shader_cache = cfg.shader_cache;
  plan.predicted_makespan_ms = simulate(plan, graph, platform, options).makespan_ms;
  return plan;
}

std::vector<std::vector<int>> round_robin(const std::vector<int>& layers, int little_cores) {
  std::vector<std::vector<int>> queues(static_cast<size_t>(little_cores));
  for (size_t k = 0; k < layers.size(); ++k) {
    queues[k % static_cast<size_t>(little_cores)].push_back(layers[k]);
  }
  return queues;
}

// The balancing core of the scheduling algorithm: one big-core step
// (pull a prep bundle to the Q_0 header when the little side is the long
// pole and the bundle fits the gap), then re-init + balance the littles.
Plan balanced_plan(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                   const PlatformConfig& platform, const SchedulerConfig& cfg) {
  const int n = graph.layer_count;
  const int m_little = platform.little_cores;
  const bool gpu = graph.mode == Mode::Gpu;
  const ProcessorClass exec_class = gpu ? ProcessorClass::Gpu : ProcessorClass::BigCluster;
  const int max_iters = cfg.max_balance_iters > 0 ? cfg.max_balance_iters : 16 * n;

  std::vector<int> header_layers;
  std::vector<int> remaining;
  if (gpu) {
    for (int i = 1; i <= n; ++i) remaining.push_back(i);
  } else {
    header_layers.push_back(1);
    for (int i = 2; i <= n; ++i) remaining.push_back(i);
  }
  if (m_little == 0) {
    // Nowhere to pipeline preps; everything rides the cluster.
    if (gpu) throw ValidationError("GPU mode requires at least one little core for preparations");
    header_layers.insert(header_layers.end(), remaining.begin(), remaining.end());
    remaining.clear();
  }

  Ms setup_ms = 0.0;
  if (graph.setup_alloc_op >= 0) setup_ms += graph.node(graph.setup_alloc_op).big_ms;
  if (graph.setup_driver_op >= 0) setup_ms += graph.node(graph.setup_driver_op).big_ms;
  Ms exec_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    exec_sum += graph.node(graph.execute_op[static_cast<size_t>(i)]).duration_on(exec_class);
  }
  auto queue0_time = [&]() {
    Ms t = setup_ms + exec_sum;
    for (int layer : header_layers) t += graph.bundle_ms(layer, ProcessorClass::BigCluster);
    return t;
  };
  auto little_time = [&](const std::vector<int>& layers) {
    Ms t = 0.0;
    for (int layer : layers) t += graph.bundle_ms(layer, ProcessorClass::LittleCore);
    return t;
  };

  std::vector<std::vector<int>> little_layers(static_cast<size_t>(m_little));
  bool guard_hit = false;
  int scan_from = 2;
  int outer = 0;
  for (;;) {
    // Re-init first so a guard break still leaves queues that partition
    // the remaining bundles.
    little_layers = round_robin(remaining, std::max(m_little, 1));
    little_layers.resize(static_cast<size_t>(m_little));
    if (++outer > max_iters) {
      guard_hit = true;
      break;
    }

    // Little-core loop: shift prep bundles from the fullest to the
    // emptiest queue while a bundle fits half the gap.
    int inner = 0;
    while (m_little >= 2) {
      if (++inner > max_iters) {
        guard_hit = true;
        break;
      }
      size_t j_max = 0, j_min = 0;
      Ms t_max = -1.0, t_min = -1.0;
      for (size_t j = 0; j < little_layers.size(); ++j) {
        Ms t = little_time(little_layers[j]);
        if (t > t_max) {
          t_max = t;
          j_max = j;
        }
        if (t_min < 0.0 || t < t_min) {
          t_min = t;
          j_min = j;
        }
      }
      if (t_max - t_min <= epsilon_for(cfg, t_max)) break;
      std::vector<int> sorted = little_layers[j_max];
      std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        return graph.bundle_ms(a, ProcessorClass::LittleCore) >
               graph.bundle_ms(b, ProcessorClass::LittleCore);
      });
      int moved = -1;
      for (int layer : sorted) {
        if (graph.bundle_ms(layer, ProcessorClass::LittleCore) < (t_max - t_min) / 2.0) {
          moved = layer;
          break;
        }
      }
      if (moved < 0) break;
      auto& src = little_layers[j_max];
      src.erase(std::find(src.begin(), src.end(), moved));
      little_layers[j_min].push_back(moved);
    }

    Ms t_q0 = queue0_time();
    Ms t_little_max = 0.0;
    for (const auto& q : little_layers) t_little_max = std::max(t_little_max, little_time(q));
    if (std::abs(t_little_max - t_q0) <= epsilon_for(cfg, std::max(t_little_max, t_q0))) break;

    bool inserted = false;
    if (!gpu && t_little_max > t_q0) {
      const Ms gap = t_little_max - t_q0;
      for (int layer : remaining) {
        if (layer < scan_from) continue;
        const Ms cost = graph.bundle_ms(layer, ProcessorClass::BigCluster) +
                        graph.bundle_ms(layer, ProcessorClass::LittleCore);
        if (cost < gap) {
          header_layers.push_back(layer);
          remaining.erase(std::find(remaining.begin(), remaining.end(), layer));
          scan_from = layer;
          inserted = true;
          break;
        }
      }
    }
    if (!inserted) break;
  }

  return assemble_plan(graph, combo, header_layers, little_layers, platform, cfg, guard_hit);
}

Ms combo_proxy_score(const VariantScore& v, int little_cores) {
  return v.prep_little_ms / std::max(1, little_cores) + v.exec_ms;
}

// Argmin bookkeeping shared by the strategies: lower makespan, then lower
// storage, then earlier enumeration order.
struct Best {
  bool has = false;
  Plan plan;

  void offer(Plan candidate) {
    if (!has) {
      plan = std::move(candidate);
      has = true;
      return;
    }
    if (candidate.predicted_makespan_ms < plan.predicted_makespan_ms - kMsTolerance) {
      plan = std::move(candidate);
    } else if (ms_equal(candidate.predicted_makespan_ms, plan.predicted_makespan_ms) &&
               candidate.storage_overhead_bytes < plan.storage_overhead_bytes) {
      plan = std::move(candidate);
    }
  }
};

}  // namespace

Ms compute_queue_time(const std::vector<int>& queue, ProcessorClass cls,
                      const OperationGraph& graph) {
  Ms total = 0.0;
  for (int op : queue) total += graph.node(op).duration_on(cls);
  return total;
}

Plan sequential_plan(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                     int little_queue_count) {
  Plan plan;
  plan.combo = combo;
  plan.storage_overhead_bytes = combo_storage(combo);
  plan.little_queues.resize(static_cast<size_t>(little_queue_count));
  if (graph.setup_alloc_op >= 0) plan.big_queue.push_back(graph.setup_alloc_op);
  if (graph.setup_driver_op >= 0) plan.big_queue.push_back(graph.setup_driver_op);
  if (graph.mode == Mode::Cpu) {
    for (int i = 1; i <= graph.layer_count; ++i) {
      for (int op : graph.bundle_ops(i)) plan.big_queue.push_back(op);
    }
  } else {
    if (little_queue_count == 0) {
      throw ValidationError("GPU mode requires at least one little core for preparations");
    }
    for (int i = 1; i <= graph.layer_count; ++i) {
      for (int op : graph.bundle_ops(i)) plan.little_queues[0].push_back(op);
    }
  }
  for (int i = 1; i <= graph.layer_count; ++i) {
    plan.big_queue.push_back(graph.execute_op[static_cast<size_t>(i)]);
  }
  return plan;
}

Plan schedule_combination(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                          const PlatformConfig& platform, const SchedulerConfig& cfg) {
  platform.validate();
  if (static_cast<int>(combo.size()) != graph.layer_count) {
    throw ValidationError("combo must select exactly one variant per layer");
  }

  Plan balanced = balanced_plan(graph, combo, platform, cfg);

  // Q_0 alone reproduces the sequential order, so pipelining may never
  // score worse than it; fall back when contention-heavy preps would.
  Plan serial = sequential_plan(graph, combo, platform.little_cores);
  SimOptions options;
  options.shader_cache = cfg.shader_cache;
  serial.predicted_makespan_ms = simulate(serial, graph, platform, options).makespan_ms;
  if (serial.predicted_makespan_ms < balanced.predicted_makespan_ms - kMsTolerance) {
    return serial;
  }
  return balanced;
}

std::vector<std::vector<VariantScore>> candidate_fronts(const ModelProfile& profile,
                                                        bool allow_cache) {
  std::vector<std::vector<VariantScore>> fronts;
  fronts.reserve(profile.layers.size());
  for (const LayerSpec& layer : profile.layers) {
    fronts.push_back(prune_dominated(enumerate_variants(layer, allow_cache)));
  }
  return fronts;
}

std::vector<VariantScore> default_combo(const ModelProfile& profile) {
  std::vector<VariantScore> combo;
  combo.reserve(profile.layers.size());
  for (const LayerSpec& layer : profile.layers) {
    combo.push_back(make_variant_score(layer.candidates.front(), 0, false));
  }
  return combo;
}

Plan generate_plan(const ModelProfile& profile, const PlatformConfig& platform,
                   const SchedulerConfig& cfg) {
  platform.validate();
  const auto fronts = candidate_fronts(profile, cfg.allow_cache);
  const int n = profile.layer_count();

  double combo_count = 1.0;
  for (const auto& front : fronts) combo_count *= static_cast<double>(front.size());

  auto evaluate = [&](const std::vector<VariantScore>& combo) {
    OperationGraph graph = build_operation_graph(profile, combo);
    return schedule_combination(graph, combo, platform, cfg);
  };

  Best best;
  switch (cfg.strategy) {
    case ComboStrategy::Exhaustive: {
      if (combo_count > static_cast<double>(cfg.combo_cap)) {
        throw ComboSpaceExceeded("combination space " + std::to_string(combo_count) +
                                 " exceeds cap " + std::to_string(cfg.combo_cap) +
                                 "; use greedy or beam strategy");
      }
      std::vector<size_t> pick(static_cast<size_t>(n), 0);
      for (;;) {
        std::vector<VariantScore> combo;
        combo.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
          combo.push_back(fronts[static_cast<size_t>(i)][pick[static_cast<size_t>(i)]]);
        }
        best.offer(evaluate(combo));
        int digit = n - 1;
        while (digit >= 0) {
          if (++pick[static_cast<size_t>(digit)] < fronts[static_cast<size_t>(digit)].size()) break;
          pick[static_cast<size_t>(digit)] = 0;
          --digit;
        }
        if (digit < 0) break;
      }
      break;
    }
    case ComboStrategy::Greedy: {
      std::vector<VariantScore> combo;
      combo.reserve(static_cast<size_t>(n));
      for (const auto& front : fronts) {
        const VariantScore* pick = &front.front();
        for (const VariantScore& v : front) {
          const Ms score = combo_proxy_score(v, platform.little_cores);
          const Ms best_score = combo_proxy_score(*pick, platform.little_cores);
          if (score < best_score - kMsTolerance ||
              (ms_equal(score, best_score) &&
               v.storage_overhead_bytes() < pick->storage_overhead_bytes())) {
            pick = &v;
          }
        }
        combo.push_back(*pick);
      }
      best.offer(evaluate(combo));
      break;
    }
    case ComboStrategy::Beam: {
      const size_t width = static_cast<size_t>(std::max(1, cfg.beam_width));
      struct Partial {
        std::vector<VariantScore> combo;
        Ms score = 0.0;
      };
      std::vector<Partial> beam{Partial{}};
      for (const auto& front : fronts) {
        std::vector<Partial> extended;
        for (const Partial& p : beam) {
          for (const VariantScore& v : front) {
            Partial q = p;
            q.combo.push_back(v);
            q.score += combo_proxy_score(v, platform.little_cores);
            extended.push_back(std::move(q));
          }
        }
        std::stable_sort(extended.begin(), extended.end(),
                         [](const Partial& a, const Partial& b) { return a.score < b.score; });
        if (extended.size() > width) extended.resize(width);
        beam = std::move(extended);
      }
      for (const Partial& p : beam) best.offer(evaluate(p.combo));
      break;
    }
  }
  return best.plan;
}

}  // namespace coldplan
