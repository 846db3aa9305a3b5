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

#ifndef COLDPLAN_CANDIDATES_HPP_
#define COLDPLAN_CANDIDATES_HPP_

#include <vector>

#include "coldplan/profile.hpp"
#include "coldplan/types.hpp"

namespace coldplan {

// A kernel x cache-decision choice with its preparation/execution costs.
// Preparation = read_raw + transform (raw) or read_cached alone (cached).
struct VariantScore {
  KernelVariant variant;  // cached flag reflects the cache decision
  int kernel_index = 0;   // position in the layer's declared candidate list
  Ms prep_little_ms = 0.0;
  Ms prep_big_ms = 0.0;
  Ms exec_ms = 0.0;

  std::uint64_t storage_overhead_bytes() const {
    return variant.cached ? variant.cached_bytes : 0;
  }
};

// Scores one kernel under a cache decision.
VariantScore make_variant_score(const KernelVariant& kernel, int kernel_index, bool cached);

// Expands a layer's kernels into at most 2*c_i variants. The cached twin is
// emitted only when the kernel has a nonzero transform on some class
// (otherwise caching is a no-op and the twin is suppressed).
std::vector<VariantScore> enumerate_variants(const LayerSpec& layer, bool allow_cache = true);

// Pareto front over (prep_little_ms, exec_ms): a variant is removed iff some
// other is <= on both axes and strictly < on one. Exact ties keep the
// earlier-declared variant; output preserves input order and is nonempty.
std::vector<VariantScore> prune_dominated(const std::vector<VariantScore>& variants);

}  // namespace coldplan

#endif  // COLDPLAN_CANDIDATES_HPP_
