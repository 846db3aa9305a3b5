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

#ifndef COLDPLAN_PROFILE_HPP_
#define COLDPLAN_PROFILE_HPP_

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "coldplan/types.hpp"

namespace coldplan {

// Per-class cost of a CPU-side operation. Reads and transforms run on either
// core class; execution has its own scalar (big cluster or GPU by mode).
struct CostPair {
  Ms little = 0.0;
  Ms big = 0.0;

  Ms on(ProcessorClass c) const { return c == ProcessorClass::LittleCore ? little : big; }
};

// One concrete implementation of an operator plus its cache decision.
// Profiles declare kernels with cached = false; the candidate filter emits
// the cached twins.
struct KernelVariant {
  std::string kernel_id;
  bool cached = false;
  CostPair read_raw_ms;
  CostPair read_cached_ms;
  CostPair transform_ms;
  Ms execute_ms = 0.0;  // BigCluster in CPU mode, Gpu in GPU mode
  Ms pipeline_create_hit_ms = 0.0;
  Ms pipeline_create_miss_ms = 0.0;
  std::uint64_t raw_bytes = 0;
  std::uint64_t cached_bytes = 0;

  bool has_transform() const {
    return transform_ms.little > kMsTolerance || transform_ms.big > kMsTolerance;
  }
  // Effective read cost under the variant's cache decision.
  Ms read_ms(ProcessorClass c) const {
    return cached ? read_cached_ms.on(c) : read_raw_ms.on(c);
  }
  Ms prep_ms(ProcessorClass c) const {
    return cached ? read_cached_ms.on(c) : read_raw_ms.on(c) + transform_ms.on(c);
  }
};

struct LayerSpec {
  int layer_index = 0;  // 1-based
  std::string operator_name;
  std::set<int> predecessors;
  std::vector<KernelVariant> candidates;  // nonempty, unique kernel_ids
};

struct SetupCost {
  Ms memory_alloc_ms = 0.0;
  Ms gpu_driver_init_ms = 0.0;  // GPU mode only
};

struct ModelProfile {
  std::string model_name;
  Mode mode = Mode::Cpu;
  SetupCost setup;
  std::vector<LayerSpec> layers;  // indices exactly 1..N

  int layer_count() const { return static_cast<int>(layers.size()); }
  const LayerSpec& layer(int index) const { return layers.at(static_cast<size_t>(index - 1)); }
  ProcessorClass executor_class() const {
    return mode == Mode::Cpu ? ProcessorClass::BigCluster : ProcessorClass::Gpu;
  }
  // Layers with no successors; makespan is the max over their executions.
  std::vector<int> sink_layers() const;
};

// Parses and validates a profile document. Unknown fields are rejected
// unless `lenient` is set. Throws ParseError / ValidationError.
ModelProfile load_profile(std::istream& source, bool lenient = false);
ModelProfile load_profile_string(const std::string& text, bool lenient = false);
ModelProfile load_profile_file(const std::string& path, bool lenient = false);

// Emits the external JSON document format; load_profile(serialize(p)) == p.
std::string serialize_profile(const ModelProfile& profile);

bool operator==(const CostPair& a, const CostPair& b);
bool operator==(const KernelVariant& a, const KernelVariant& b);
bool operator==(const LayerSpec& a, const LayerSpec& b);
bool operator==(const ModelProfile& a, const ModelProfile& b);

}  // namespace coldplan

#endif  // COLDPLAN_PROFILE_HPP_
