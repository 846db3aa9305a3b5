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

#include "coldplan/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace coldplan {

Ms sequential_baseline(const ModelProfile& profile, const std::vector<VariantScore>& combo) {
  if (combo.size() != profile.layers.size()) {
    throw ValidationError("combo must select exactly one variant per layer");
  }
  Ms total = profile.setup.memory_alloc_ms;
  if (profile.mode == Mode::Gpu) total += profile.setup.gpu_driver_init_ms;
  for (const VariantScore& v : combo) {
    total += v.variant.prep_ms(ProcessorClass::BigCluster);
    if (profile.mode == Mode::Gpu) total += v.variant.pipeline_create_miss_ms;
    total += v.exec_ms;
  }
  return total;
}

namespace {

using Clock = std::chrono::steady_clock;

// Exhaustive placement search over the heuristic's plan family: each prep
// bundle goes into the Q_0 header (CPU mode) or one of the little queues,
// in every order; executes stay on the cluster in layer order.
class Search {
 public:
  Search(const OperationGraph& graph, const std::vector<VariantScore>& combo,
         const PlatformConfig& platform, const OracleLimits& limits, bool prune)
      : graph_(graph),
        combo_(combo),
        platform_(platform),
        limits_(limits),
        prune_(prune),
        deadline_(Clock::now() + std::chrono::milliseconds(limits.time_budget_ms)) {}

  OracleResult run() {
    if (graph_.size() > limits_.max_ops) {
      throw LimitsExceeded("instance has " + std::to_string(graph_.size()) +
                           " operations; oracle limit is " + std::to_string(limits_.max_ops));
    }
    if (platform_.little_cores + 1 > limits_.max_cores) {
      throw LimitsExceeded("instance uses " + std::to_string(platform_.little_cores + 1) +
                           " cores; oracle limit is " + std::to_string(limits_.max_cores));
    }
    const bool gpu = graph_.mode == Mode::Gpu;
    if (gpu && platform_.little_cores == 0) {
      throw ValidationError("GPU mode requires at least one little core for preparations");
    }

    setup_exec_ms_ = 0.0;
    if (graph_.setup_alloc_op >= 0) setup_exec_ms_ += graph_.node(graph_.setup_alloc_op).big_ms;
    if (graph_.setup_driver_op >= 0) setup_exec_ms_ += graph_.node(graph_.setup_driver_op).big_ms;
    const ProcessorClass exec_class = gpu ? ProcessorClass::Gpu : ProcessorClass::BigCluster;
    for (int i = 1; i <= graph_.layer_count; ++i) {
      setup_exec_ms_ += graph_.node(graph_.execute_op[static_cast<size_t>(i)]).duration_on(exec_class);
    }

    header_allowed_ = !gpu;
    littles_.assign(static_cast<size_t>(platform_.little_cores), {});
    assign(1);

    if (!result_.has) {
      throw ValidationError("oracle search found no feasible placement");
    }
    OracleResult out;
    out.plan = result_.plan;
    out.makespan_ms = result_.plan.predicted_makespan_ms;
    out.optimal = !budget_hit_;
    out.states_explored = states_;
    return out;
  }

 private:
  void assign(int layer) {
    if (budget_hit_) return;
    if (layer > graph_.layer_count) {
      evaluate();
      return;
    }
    if (prune_ && result_.has && lower_bound() >= result_.plan.predicted_makespan_ms) return;

    if (header_allowed_) {
      // Header positions are enumerated by insertion point (all orders).
      for (size_t pos = 0; pos <= header_.size(); ++pos) {
        header_.insert(header_.begin() + static_cast<long>(pos), layer);
        assign(layer + 1);
        header_.erase(header_.begin() + static_cast<long>(pos));
      }
    }
    for (auto& little : littles_) {
      for (size_t pos = 0; pos <= little.size(); ++pos) {
        little.insert(little.begin() + static_cast<long>(pos), layer);
        assign(layer + 1);
        little.erase(little.begin() + static_cast<long>(pos));
      }
    }
  }

  Ms lower_bound() const {
    Ms bound = setup_exec_ms_;
    for (int layer : header_) bound += graph_.bundle_ms(layer, ProcessorClass::BigCluster);
    for (const auto& little : littles_) {
      Ms t = 0.0;
      for (int layer : little) t += graph_.bundle_ms(layer, ProcessorClass::LittleCore);
      bound = std::max(bound, t);
    }
    return bound;
  }

  void evaluate() {
    // The first placement is always scored so a best-found plan exists
    // even when the time budget is already gone.
    if (result_.has && Clock::now() > deadline_) {
      budget_hit_ = true;
      return;
    }
    ++states_;
    Plan plan;
    plan.combo = combo_;
    for (const VariantScore& v : combo_) plan.storage_overhead_bytes += v.storage_overhead_bytes();
    if (graph_.setup_alloc_op >= 0) plan.big_queue.push_back(graph_.setup_alloc_op);
    if (graph_.setup_driver_op >= 0) plan.big_queue.push_back(graph_.setup_driver_op);
    for (int layer : header_) {
      for (int op : graph_.bundle_ops(layer)) plan.big_queue.push_back(op);
    }
    for (int i = 1; i <= graph_.layer_count; ++i) {
      plan.big_queue.push_back(graph_.execute_op[static_cast<size_t>(i)]);
    }
    plan.little_queues.resize(static_cast<size_t>(platform_.little_cores));
    for (size_t j = 0; j < littles_.size(); ++j) {
      for (int layer : littles_[j]) {
        for (int op : graph_.bundle_ops(layer)) plan.little_queues[j].push_back(op);
      }
    }
    plan.predicted_makespan_ms = simulate(plan, graph_, platform_).makespan_ms;
    if (!result_.has ||
        plan.predicted_makespan_ms < result_.plan.predicted_makespan_ms - kMsTolerance) {
      result_.plan = std::move(plan);
      result_.has = true;
    }
  }

  const OperationGraph& graph_;
  const std::vector<VariantScore>& combo_;
  const PlatformConfig& platform_;
  const OracleLimits& limits_;
  const bool prune_;
  const Clock::time_point deadline_;

  bool header_allowed_ = true;
  std::vector<int> header_;
  std::vector<std::vector<int>> littles_;
  Ms setup_exec_ms_ = 0.0;
  std::uint64_t states_ = 0;
  bool budget_hit_ = false;
  struct {
    bool has = false;
    Plan plan;
  } result_;
};

}  // namespace

OracleResult optimal_schedule(const OperationGraph& graph, const std::vector<VariantScore>& combo,
                              const PlatformConfig& platform, const OracleLimits& limits,
                              bool prune) {
  platform.validate();
  Search search(graph, combo, platform, limits, prune);
  return search.run();
}

ModelProfile random_profile(std::uint64_t seed, const RandomInstanceOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    // Centisecond grid keeps documents short and comparisons exact.
    return std::round(dist(rng) * 100.0) / 100.0;
  };
  auto uniform_int = [&rng](int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    return dist(rng);
  };

  ModelProfile profile;
  profile.model_name = "random-" + std::to_string(seed);
  profile.mode = Mode::Cpu;
  profile.setup.memory_alloc_ms = 0.0;

  const int n = uniform_int(options.min_layers, options.max_layers);
  for (int i = 1; i <= n; ++i) {
    LayerSpec layer;
    layer.layer_index = i;
    layer.operator_name = "op" + std::to_string(i);
    if (i > 1) {
      if (options.chain_only) {
        layer.predecessors.insert(i - 1);
      } else {
        for (int p = 1; p < i; ++p) {
          if (uniform_int(0, 1) == 1) layer.predecessors.insert(p);
        }
        if (layer.predecessors.empty() && uniform_int(0, 2) != 0) {
          layer.predecessors.insert(uniform_int(1, i - 1));
        }
      }
    }
    const int kernels = uniform_int(1, options.max_kernels);
    for (int k = 0; k < kernels; ++k) {
      KernelVariant kv;
      kv.kernel_id = "k" + std::to_string(k);
      const Ms read = uniform(0.2, 3.0);
      kv.read_raw_ms = {read, read};
      const bool has_transform = uniform_int(0, 3) != 0;
      if (has_transform) {
        const Ms t_little = uniform(0.5, 4.0);
        kv.transform_ms = {t_little, std::round(t_little * uniform(0.3, 1.0) * 100.0) / 100.0};
        const Ms cached = uniform(read, read + t_little);
        kv.read_cached_ms = {cached, cached};
      } else {
        kv.transform_ms = {0.0, 0.0};
        kv.read_cached_ms = kv.read_raw_ms;
      }
      kv.execute_ms = uniform(0.5, 5.0);
      kv.raw_bytes = static_cast<std::uint64_t>(read * 1000.0);
      kv.cached_bytes = static_cast<std::uint64_t>(kv.read_cached_ms.little * 1000.0);
      layer.candidates.push_back(kv);
    }
    profile.layers.push_back(layer);
  }
  return profile;
}

}  // namespace coldplan
