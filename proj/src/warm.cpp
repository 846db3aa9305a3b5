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

#include "coldplan/warm.hpp"

#include <algorithm>

namespace coldplan {

namespace {

struct Window {
  Ms start = 0.0;
  Ms end = 0.0;
  CoreId core = 0;

  Ms length() const { return end - start; }
};

using Intervals = std::vector<std::pair<Ms, Ms>>;

Intervals merge(Intervals intervals) {
  std::sort(intervals.begin(), intervals.end());
  Intervals merged;
  for (const auto& iv : intervals) {
    if (iv.second - iv.first <= kMsTolerance) continue;
    if (!merged.empty() && iv.first <= merged.back().second + kMsTolerance) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

// windows minus blocked, preserving (start, core) order.
std::vector<Window> subtract(const std::vector<Window>& windows, const Intervals& blocked) {
  std::vector<Window> out;
  for (const Window& w : windows) {
    Ms cursor = w.start;
    for (const auto& b : blocked) {
      if (b.second <= cursor + kMsTolerance) continue;
      if (b.first >= w.end - kMsTolerance) break;
      if (b.first > cursor + kMsTolerance) out.push_back({cursor, std::min(b.first, w.end), w.core});
      cursor = std::max(cursor, b.second);
      if (cursor >= w.end - kMsTolerance) break;
    }
    if (cursor < w.end - kMsTolerance) out.push_back({cursor, w.end, w.core});
  }
  return out;
}

// Warm pick for one layer: argmin execute over the enumerated variants;
// ties prefer the cold choice (no switch), then smaller little-core prep,
// then declaration order.
VariantScore warm_pick(const LayerSpec& layer, const VariantScore& cold, bool allow_cache) {
  const std::vector<VariantScore> variants = enumerate_variants(layer, allow_cache);
  const VariantScore* best = &variants.front();
  for (const VariantScore& v : variants) {
    if (v.exec_ms < best->exec_ms - kMsTolerance) best = &v;
  }
  for (const VariantScore& v : variants) {
    if (!ms_equal(v.exec_ms, best->exec_ms)) continue;
    if (v.kernel_index == cold.kernel_index && v.variant.cached == cold.variant.cached) return v;
  }
  for (const VariantScore& v : variants) {
    if (ms_equal(v.exec_ms, best->exec_ms) &&
        v.prep_little_ms < best->prep_little_ms - kMsTolerance) {
      best = &v;
    }
  }
  return *best;
}

}  // namespace

WarmSwitchPlan plan_warm_switch(const Plan& cold_plan, const SimReport& cold_report,
                                const ModelProfile& profile, const PlatformConfig& platform,
                                bool allow_cache) {
  WarmSwitchPlan wsp;
  wsp.k_cold = cold_plan.combo;
  for (const LayerSpec& layer : profile.layers) {
    wsp.k_warm.push_back(warm_pick(
        layer, cold_plan.combo[static_cast<size_t>(layer.layer_index - 1)], allow_cache));
  }

  std::vector<int> switching;  // layers whose warm kernel differs from the cold one
  for (int i = 1; i <= profile.layer_count(); ++i) {
    if (wsp.k_warm[static_cast<size_t>(i - 1)].kernel_index !=
        wsp.k_cold[static_cast<size_t>(i - 1)].kernel_index) {
      switching.push_back(i);
    }
  }
  if (switching.empty()) return wsp;

  // Idle tail per little core, minus every window where cold disk/memory
  // traffic is active. Claimed windows join the blocked set so injected
  // preps never overlap each other either.
  Intervals io_busy;
  {
    OperationGraph cold_graph = build_operation_graph(profile, cold_plan.combo);
    for (const TimelineEntry& e : cold_report.timeline) {
      const ResourceClass rc = cold_graph.node(e.op_id).resource_class;
      if (rc == ResourceClass::Compute) continue;
      if (e.end_ms - e.start_ms <= kMsTolerance) continue;
      io_busy.push_back({e.start_ms, e.end_ms});
    }
  }

  std::vector<Window> windows;
  for (CoreId core = 1; core <= platform.little_cores; ++core) {
    Ms tail_start = 0.0;
    for (const TimelineEntry& e : cold_report.timeline) {
      if (e.core == core) tail_start = std::max(tail_start, e.end_ms);
    }
    if (cold_report.makespan_ms - tail_start > kMsTolerance) {
      windows.push_back({tail_start, cold_report.makespan_ms, core});
    }
  }

  // First-fit-decreasing over the switching layers' warm prep bundles.
  std::vector<int> order = switching;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return wsp.k_warm[static_cast<size_t>(a - 1)].prep_little_ms >
           wsp.k_warm[static_cast<size_t>(b - 1)].prep_little_ms;
  });
  Intervals blocked = merge(io_busy);
  std::vector<bool> fitted(static_cast<size_t>(profile.layer_count()) + 1, false);
  for (int layer : order) {
    const VariantScore& v = wsp.k_warm[static_cast<size_t>(layer - 1)];
    const Ms need = v.prep_little_ms;
    std::vector<Window> free = subtract(windows, blocked);
    std::stable_sort(free.begin(), free.end(), [](const Window& a, const Window& b) {
      return a.start < b.start || (a.start == b.start && a.core < b.core);
    });
    for (const Window& w : free) {
      if (w.length() + kMsTolerance < need) continue;
      ExtraPrep prep;
      prep.layer = layer;
      prep.variant = v;
      prep.core = w.core;
      prep.start_ms = w.start;
      prep.duration_ms = need;
      wsp.extra_preps.push_back(prep);
      blocked = merge([&] {
        Intervals b = blocked;
        b.push_back({w.start, w.start + need});
        return b;
      }());
      fitted[static_cast<size_t>(layer)] = true;
      break;
    }
  }
  for (int layer : switching) {
    if (!fitted[static_cast<size_t>(layer)]) wsp.residual.push_back(layer);
  }
  std::sort(wsp.extra_preps.begin(), wsp.extra_preps.end(),
            [](const ExtraPrep& a, const ExtraPrep& b) { return a.layer < b.layer; });
  return wsp;
}

Ms warm_execute_sum(const WarmSwitchPlan& wsp) {
  Ms total = 0.0;
  for (const VariantScore& v : wsp.k_warm) total += v.exec_ms;
  return total;
}

std::vector<InjectedOp> injected_ops(const WarmSwitchPlan& wsp) {
  std::vector<InjectedOp> ops;
  for (const ExtraPrep& prep : wsp.extra_preps) {
    const KernelVariant& kv = prep.variant.variant;
    Ms at = prep.start_ms;
    InjectedOp read;
    read.layer = prep.layer;
    read.kind = OpKind::Read;
    read.resource_class = ResourceClass::DiskIo;
    read.core = prep.core;
    read.not_before_ms = at;
    read.duration_ms = kv.read_ms(ProcessorClass::LittleCore);
    ops.push_back(read);
    at += read.duration_ms;
    if (!kv.cached) {
      InjectedOp transform;
      transform.layer = prep.layer;
      transform.kind = OpKind::Transform;
      transform.resource_class = ResourceClass::MemBandwidth;
      transform.core = prep.core;
      transform.not_before_ms = at;
      transform.duration_ms = kv.transform_ms.little;
      ops.push_back(transform);
    }
  }
  return ops;
}

Ms second_inference_latency(const WarmSwitchPlan& wsp, const ModelProfile& profile,
                            const PlatformConfig& platform, const SchedulerConfig& cfg) {
  if (wsp.residual.empty()) return warm_execute_sum(wsp);

  // Reduced pipeline: residual layers still prep their warm kernels; every
  // other layer runs resident (zero-prep) warm kernels. Memory stays
  // allocated between inferences.
  ModelProfile reduced = profile;
  reduced.setup = SetupCost{};
  std::vector<VariantScore> combo;
  for (int i = 1; i <= profile.layer_count(); ++i) {
    const VariantScore& warm = wsp.k_warm[static_cast<size_t>(i - 1)];
    const bool residual =
        std::find(wsp.residual.begin(), wsp.residual.end(), i) != wsp.residual.end();
    KernelVariant kv = warm.variant;
    if (!residual) {
      kv.read_raw_ms = CostPair{};
      kv.read_cached_ms = CostPair{};
      kv.transform_ms = CostPair{};
      kv.pipeline_create_hit_ms = 0.0;
      kv.pipeline_create_miss_ms = 0.0;
      kv.cached = false;
    }
    reduced.layers[static_cast<size_t>(i - 1)].candidates = {kv};
    combo.push_back(make_variant_score(kv, 0, kv.cached));
  }
  OperationGraph graph = build_operation_graph(reduced, combo);
  Plan plan = schedule_combination(graph, combo, platform, cfg);
  return plan.predicted_makespan_ms;
}

}  // namespace coldplan
