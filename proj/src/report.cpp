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

#include "coldplan/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "coldplan/oracle.hpp"

namespace coldplan {

namespace {

using nlohmann::ordered_json;

ordered_json combo_json(const std::vector<VariantScore>& combo) {
  ordered_json arr = ordered_json::array();
  for (size_t i = 0; i < combo.size(); ++i) {
    arr.push_back(ordered_json{{"layer", i + 1},
                               {"kernel", combo[i].variant.kernel_id},
                               {"cached", combo[i].variant.cached}});
  }
  return arr;
}

std::string fixed6(Ms value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

// Per-layer sequential cold cost of one variant at big-core rates.
Ms sequential_variant_cost(const VariantScore& v, Mode mode, bool shader_cache) {
  Ms cost = v.variant.prep_ms(ProcessorClass::BigCluster) + v.exec_ms;
  if (mode == Mode::Gpu) {
    cost += shader_cache ? v.variant.pipeline_create_hit_ms : v.variant.pipeline_create_miss_ms;
  }
  return cost;
}

std::vector<VariantScore> argmin_sequential_combo(const ModelProfile& profile, bool allow_cache,
                                                  bool shader_cache) {
  std::vector<VariantScore> combo;
  for (const LayerSpec& layer : profile.layers) {
    const auto variants = enumerate_variants(layer, allow_cache);
    const VariantScore* pick = &variants.front();
    for (const VariantScore& v : variants) {
      const Ms cost = sequential_variant_cost(v, profile.mode, shader_cache);
      const Ms best = sequential_variant_cost(*pick, profile.mode, shader_cache);
      if (cost < best - kMsTolerance ||
          (ms_equal(cost, best) && v.storage_overhead_bytes() < pick->storage_overhead_bytes())) {
        pick = &v;
      }
    }
    combo.push_back(*pick);
  }
  return combo;
}

Ms sequential_sum(const ModelProfile& profile, const std::vector<VariantScore>& combo,
                  bool shader_cache) {
  Ms total = profile.setup.memory_alloc_ms;
  if (profile.mode == Mode::Gpu) total += profile.setup.gpu_driver_init_ms;
  for (const VariantScore& v : combo) {
    total += sequential_variant_cost(v, profile.mode, shader_cache);
  }
  return total;
}

}  // namespace

std::string plan_to_json(const Plan& plan) {
  ordered_json doc;
  doc["combo"] = combo_json(plan.combo);
  ordered_json queues;
  queues["big"] = plan.big_queue;
  queues["little"] = plan.little_queues;
  doc["queues"] = queues;
  doc["predicted_makespan_ms"] = plan.predicted_makespan_ms;
  doc["storage_overhead_bytes"] = plan.storage_overhead_bytes;
  if (plan.balance_guard_hit) doc["balance_guard_hit"] = true;
  return doc.dump(2) + "\n";
}

std::string report_summary_json(const SimReport& report, const OperationGraph& graph) {
  ordered_json doc;
  doc["makespan_ms"] = report.makespan_ms;
  Ms read = 0.0, transform = 0.0, pipeline = 0.0, execute = 0.0, setup = 0.0;
  for (const TimelineEntry& e : report.timeline) {
    const Ms wall = e.end_ms - e.start_ms;
    switch (graph.node(e.op_id).kind) {
      case OpKind::Read: read += wall; break;
      case OpKind::Transform: transform += wall; break;
      case OpKind::PipelineCreate: pipeline += wall; break;
      case OpKind::Execute: execute += wall; break;
      case OpKind::Setup: setup += wall; break;
    }
  }
  doc["stage_totals_ms"] = ordered_json{{"setup", setup},
                                        {"read", read},
                                        {"transform", transform},
                                        {"pipeline_create", pipeline},
                                        {"execute", execute}};
  ordered_json idle;
  for (const auto& [core, ms] : report.per_core_idle_ms) idle[core_name(core)] = ms;
  doc["idle_ms"] = idle;
  ordered_json steals = ordered_json::array();
  for (const StealEvent& s : report.steals) {
    steals.push_back(ordered_json{{"op", s.op_id},
                                  {"from", core_name(s.from_core)},
                                  {"to", core_name(s.to_core)},
                                  {"time_ms", s.time_ms}});
  }
  doc["steals"] = steals;
  doc["storage_overhead_bytes"] = report.storage_overhead_bytes;
  return doc.dump(2) + "\n";
}

std::string warm_switch_to_json(const WarmSwitchPlan& wsp, Ms second_ms, Ms warm_sum_ms) {
  ordered_json doc;
  doc["k_cold"] = combo_json(wsp.k_cold);
  doc["k_warm"] = combo_json(wsp.k_warm);
  ordered_json preps = ordered_json::array();
  for (const ExtraPrep& p : wsp.extra_preps) {
    preps.push_back(ordered_json{{"layer", p.layer},
                                 {"kernel", p.variant.variant.kernel_id},
                                 {"cached", p.variant.variant.cached},
                                 {"core", core_name(p.core)},
                                 {"start_ms", p.start_ms},
                                 {"duration_ms", p.duration_ms}});
  }
  doc["extra_preps"] = preps;
  doc["residual"] = wsp.residual;
  doc["second_inference_ms"] = second_ms;
  doc["warm_execute_sum_ms"] = warm_sum_ms;
  doc["third_inference_ms"] = warm_sum_ms;
  return doc.dump(2) + "\n";
}

void write_gantt_csv(std::ostream& out, const SimReport& report, const OperationGraph& graph) {
  out << "op_id,layer,kind,core,start_ms,end_ms,stalled_ms,slowdown\n";
  std::vector<const TimelineEntry*> rows;
  rows.reserve(report.timeline.size());
  for (const TimelineEntry& e : report.timeline) rows.push_back(&e);
  std::sort(rows.begin(), rows.end(), [](const TimelineEntry* a, const TimelineEntry* b) {
    if (a->start_ms != b->start_ms) return a->start_ms < b->start_ms;
    return a->op_id < b->op_id;
  });
  for (const TimelineEntry* e : rows) {
    const OperationNode& node = graph.node(e->op_id);
    out << e->op_id << ',' << node.layer_index << ',' << to_string(node.kind) << ','
        << core_name(e->core) << ',' << fixed6(e->start_ms) << ',' << fixed6(e->end_ms) << ','
        << fixed6(e->stalled_ms) << ',' << fixed6(e->slowdown_factor) << '\n';
  }
}

AblationResult run_ablation(const ModelProfile& profile, const PlatformConfig& platform,
                            const SchedulerConfig& cfg) {
  AblationResult result;
  result.baseline_ms = sequential_baseline(profile, default_combo(profile));

  const auto k_combo = argmin_sequential_combo(profile, /*allow_cache=*/false,
                                               /*shader_cache=*/false);
  result.k_ms = sequential_sum(profile, k_combo, /*shader_cache=*/false);

  const auto kc_combo = argmin_sequential_combo(profile, cfg.allow_cache,
                                                /*shader_cache=*/true);
  result.kc_ms = sequential_sum(profile, kc_combo, /*shader_cache=*/true);

  SchedulerConfig full = cfg;
  full.shader_cache = profile.mode == Mode::Gpu;
  Plan plan = generate_plan(profile, platform, full);
  result.kcp_ms = plan.predicted_makespan_ms;
  return result;
}

std::string ablation_to_json(const AblationResult& result) {
  ordered_json doc;
  doc["baseline_ms"] = result.baseline_ms;
  doc["k_ms"] = result.k_ms;
  doc["kc_ms"] = result.kc_ms;
  doc["kcp_ms"] = result.kcp_ms;
  return doc.dump(2) + "\n";
}

std::map<CoreId, std::vector<LoadInterval>> load_trace_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed load trace: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("load trace must be a JSON object");
  std::map<CoreId, std::vector<LoadInterval>> trace;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    CoreId core;
    if (it.key() == "gpu") {
      core = kGpuCore;
    } else {
      try {
        core = std::stoi(it.key());
      } catch (const std::exception&) {
        throw ParseError("load trace core key must be a core number or \"gpu\": " + it.key());
      }
    }
    if (!it.value().is_array()) throw ParseError("load trace entries must be arrays");
    for (const auto& iv : it.value()) {
      if (!iv.is_array() || iv.size() != 3) {
        throw ParseError("load intervals must be [start_ms, end_ms, utilization]");
      }
      LoadInterval interval;
      interval.start_ms = iv[0].get<double>();
      interval.end_ms = iv[1].get<double>();
      interval.utilization = iv[2].get<double>();
      trace[core].push_back(interval);
    }
  }
  return trace;
}

std::map<CoreId, std::vector<LoadInterval>> load_trace_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open load trace file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_trace_from_json(text);
}

}  // namespace coldplan
