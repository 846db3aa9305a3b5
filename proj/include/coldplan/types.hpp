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

#ifndef COLDPLAN_TYPES_HPP_
#define COLDPLAN_TYPES_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace coldplan {

// Durations are milliseconds with at least microsecond resolution.
using Ms = double;

// Absolute tolerance for all duration comparisons.
inline constexpr Ms kMsTolerance = 1e-9;

inline bool ms_equal(Ms a, Ms b) { return (a > b ? a - b : b - a) <= kMsTolerance; }

enum class ProcessorClass { LittleCore, BigCluster, Gpu };

enum class Mode { Cpu, Gpu };

inline const char* to_string(ProcessorClass c) {
  switch (c) {
    case ProcessorClass::LittleCore: return "little";
    case ProcessorClass::BigCluster: return "big";
    case ProcessorClass::Gpu: return "gpu";
  }
  return "?";
}

inline const char* to_string(Mode m) { return m == Mode::Cpu ? "cpu" : "gpu"; }

// Core ids: 0 is the big cluster (one schedulable resource), 1..M_l are the
// individually schedulable little cores, kGpuCore is the GPU.
using CoreId = int;
inline constexpr CoreId kBigClusterCore = 0;
inline constexpr CoreId kGpuCore = -1;

inline std::string core_name(CoreId id) {
  if (id == kBigClusterCore) return "big";
  if (id == kGpuCore) return "gpu";
  return "little" + std::to_string(id);
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ComboSpaceExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DeadlockDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LimitsExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coldplan

#endif  // COLDPLAN_TYPES_HPP_
