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

#include "coldplan/candidates.hpp"

namespace coldplan {

namespace {

// B dominates A: no worse on both axes, strictly better on one.
bool dominates(const VariantScore& b, const VariantScore& a) {
  const bool prep_le = b.prep_little_ms <= a.prep_little_ms + kMsTolerance;
  const bool exec_le = b.exec_ms <= a.exec_ms + kMsTolerance;
  const bool prep_lt = b.prep_little_ms < a.prep_little_ms - kMsTolerance;
  const bool exec_lt = b.exec_ms < a.exec_ms - kMsTolerance;
  return prep_le && exec_le && (prep_lt || exec_lt);
}

bool tied(const VariantScore& a, const VariantScore& b) {
  return ms_equal(a.prep_little_ms, b.prep_little_ms) && ms_equal(a.exec_ms, b.exec_ms);
}

}  // namespace

VariantScore make_variant_score(const KernelVariant& kernel, int kernel_index, bool cached) {
  VariantScore vs;
  vs.variant = kernel;
  vs.variant.cached = cached;
  vs.kernel_index = kernel_index;
  vs.prep_little_ms = vs.variant.prep_ms(ProcessorClass::LittleCore);
  vs.prep_big_ms = vs.variant.prep_ms(ProcessorClass::BigCluster);
  vs.exec_ms = vs.variant.execute_ms;
  return vs;
}

std::vector<VariantScore> enumerate_variants(const LayerSpec& layer, bool allow_cache) {
  std::vector<VariantScore> variants;
  variants.reserve(layer.candidates.size() * 2);
  for (size_t k = 0; k < layer.candidates.size(); ++k) {
    const KernelVariant& kv = layer.candidates[k];
    variants.push_back(make_variant_score(kv, static_cast<int>(k), false));
    if (allow_cache && kv.has_transform()) {
      variants.push_back(make_variant_score(kv, static_cast<int>(k), true));
    }
  }
  return variants;
}

std::vector<VariantScore> prune_dominated(const std::vector<VariantScore>& variants) {
  std::vector<VariantScore> front;
  for (size_t i = 0; i < variants.size(); ++i) {
    bool keep = true;
    for (size_t j = 0; j < variants.size(); ++j) {
      if (i == j) continue;
      if (dominates(variants[j], variants[i])) {
        keep = false;
        break;
      }
      // Exact tie: keep only the earlier-declared variant.
      if (j < i && tied(variants[j], variants[i])) {
        keep = false;
        break;
      }
    }
    if (keep) front.push_back(variants[i]);
  }
  return front;
}

}  // namespace coldplan
