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

#include "coldplan/profile.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coldplan {

namespace {

using nlohmann::ordered_json;

void reject_unknown_fields(const ordered_json& obj, const std::set<std::string>& allowed,
                           const std::string& where, bool lenient) {
  if (lenient) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError("unknown field \"" + it.key() + "\" in " + where);
    }
  }
}

Ms read_duration(const ordered_json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError("missing field \"" + key + "\" in " + where);
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError("field \"" + key + "\" in " + where + " is not a number");
  Ms ms = v.get<double>();
  if (!std::isfinite(ms)) throw ValidationError(where + "." + key + " is not finite");
  if (ms < 0.0) throw ValidationError(where + "." + key + " is negative");
  return ms;
}

CostPair read_cost_pair(const ordered_json& costs, const std::string& key,
                        const std::string& where, bool lenient) {
  if (!costs.contains(key)) throw ParseError("missing field \"" + key + "\" in " + where);
  const auto& obj = costs.at(key);
  if (!obj.is_object()) throw ParseError(where + "." + key + " must be an object");
  reject_unknown_fields(obj, {"little", "big"}, where + "." + key, lenient);
  CostPair pair;
  pair.little = read_duration(obj, "little", where + "." + key);
  pair.big = read_duration(obj, "big", where + "." + key);
  return pair;
}

KernelVariant parse_kernel(const ordered_json& k, Mode mode, const std::string& where,
                           bool lenient) {
  if (!k.is_object()) throw ParseError(where + " must be an object");
  reject_unknown_fields(k, {"id", "costs", "bytes"}, where, lenient);
  if (!k.contains("id") || !k.at("id").is_string()) {
    throw ParseError(where + " needs a string \"id\"");
  }
  KernelVariant kv;
  kv.kernel_id = k.at("id").get<std::string>();
  if (!k.contains("costs") || !k.at("costs").is_object()) {
    throw ParseError(where + " needs a \"costs\" object");
  }
  const auto& costs = k.at("costs");
  reject_unknown_fields(
      costs, {"read_raw_ms", "read_cached_ms", "transform_ms", "execute_ms", "pipeline_create_ms"},
      where + ".costs", lenient);
  kv.read_raw_ms = read_cost_pair(costs, "read_raw_ms", where + ".costs", lenient);
  kv.read_cached_ms = read_cost_pair(costs, "read_cached_ms", where + ".costs", lenient);
  kv.transform_ms = read_cost_pair(costs, "transform_ms", where + ".costs", lenient);

  if (!costs.contains("execute_ms") || !costs.at("execute_ms").is_object()) {
    throw ParseError(where + ".costs needs an \"execute_ms\" object");
  }
  const auto& exec = costs.at("execute_ms");
  const std::string exec_key = mode == Mode::Cpu ? "big" : "gpu";
  reject_unknown_fields(exec, {exec_key}, where + ".costs.execute_ms", lenient);
  kv.execute_ms = read_duration(exec, exec_key, where + ".costs.execute_ms");

  if (costs.contains("pipeline_create_ms")) {
    if (mode == Mode::Cpu) {
      throw ValidationError(where + ".costs.pipeline_create_ms is GPU-mode only");
    }
    const auto& pc = costs.at("pipeline_create_ms");
    if (!pc.is_object()) throw ParseError(where + ".costs.pipeline_create_ms must be an object");
    reject_unknown_fields(pc, {"hit", "miss"}, where + ".costs.pipeline_create_ms", lenient);
    kv.pipeline_create_hit_ms = read_duration(pc, "hit", where + ".costs.pipeline_create_ms");
    kv.pipeline_create_miss_ms = read_duration(pc, "miss", where + ".costs.pipeline_create_ms");
  }

  if (k.contains("bytes")) {
    const auto& bytes = k.at("bytes");
    if (!bytes.is_object()) throw ParseError(where + ".bytes must be an object");
    reject_unknown_fields(bytes, {"raw", "cached"}, where + ".bytes", lenient);
    if (bytes.contains("raw")) {
      if (!bytes.at("raw").is_number_unsigned()) {
        throw ValidationError(where + ".bytes.raw must be a nonnegative integer");
      }
      kv.raw_bytes = bytes.at("raw").get<std::uint64_t>();
    }
    if (bytes.contains("cached")) {
      if (!bytes.at("cached").is_number_unsigned()) {
        throw ValidationError(where + ".bytes.cached must be a nonnegative integer");
      }
      kv.cached_bytes = bytes.at("cached").get<std::uint64_t>();
    }
  }

  if (!kv.has_transform()) {
    // Caching a transform-free kernel is a no-op; the profile must say so.
    if (!ms_equal(kv.read_cached_ms.little, kv.read_raw_ms.little) ||
        !ms_equal(kv.read_cached_ms.big, kv.read_raw_ms.big)) {
      throw ValidationError(where + ": zero-transform kernel \"" + kv.kernel_id +
                            "\" must have read_cached_ms equal to read_raw_ms");
    }
  }
  return kv;
}

void validate_profile(const ModelProfile& profile) {
  const int n = profile.layer_count();
  if (n == 0) throw ValidationError("profile has no layers");
  for (int i = 1; i <= n; ++i) {
    const LayerSpec& layer = profile.layers[static_cast<size_t>(i - 1)];
    const std::string where = "layer " + std::to_string(layer.layer_index);
    if (layer.layer_index != i) {
      throw ValidationError("layer indices must be exactly 1..N in order; found " +
                            std::to_string(layer.layer_index) + " at position " +
                            std::to_string(i));
    }
    if (layer.candidates.empty()) throw ValidationError(where + " has no kernel candidates");
    std::set<std::string> ids;
    for (const KernelVariant& kv : layer.candidates) {
      if (!ids.insert(kv.kernel_id).second) {
        throw ValidationError(where + " has duplicate kernel_id \"" + kv.kernel_id + "\"");
      }
    }
    for (int pred : layer.predecessors) {
      if (pred < 1 || pred >= layer.layer_index) {
        throw ValidationError(where + " has dangling predecessor " + std::to_string(pred));
      }
    }
  }
  if (profile.mode == Mode::Cpu && profile.setup.gpu_driver_init_ms > 0.0) {
    throw ValidationError("setup.gpu_driver_init_ms is GPU-mode only");
  }
}

ordered_json cost_pair_json(const CostPair& p) {
  return ordered_json{{"little", p.little}, {"big", p.big}};
}

}  // namespace

std::vector<int> ModelProfile::sink_layers() const {
  std::vector<bool> has_successor(layers.size() + 1, false);
  for (const LayerSpec& layer : layers) {
    for (int pred : layer.predecessors) has_successor[static_cast<size_t>(pred)] = true;
  }
  std::vector<int> sinks;
  for (const LayerSpec& layer : layers) {
    if (!has_successor[static_cast<size_t>(layer.layer_index)]) sinks.push_back(layer.layer_index);
  }
  return sinks;
}

ModelProfile load_profile(std::istream& source, bool lenient) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed profile document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("profile document must be a JSON object");
  reject_unknown_fields(doc, {"model", "mode", "setup", "layers"}, "document", lenient);

  ModelProfile profile;
  if (!doc.contains("model") || !doc.at("model").is_string()) {
    throw ParseError("document needs a string \"model\"");
  }
  profile.model_name = doc.at("model").get<std::string>();

  if (!doc.contains("mode") || !doc.at("mode").is_string()) {
    throw ParseError("document needs a string \"mode\"");
  }
  const std::string mode = doc.at("mode").get<std::string>();
  if (mode == "cpu") {
    profile.mode = Mode::Cpu;
  } else if (mode == "gpu") {
    profile.mode = Mode::Gpu;
  } else {
    throw ParseError("mode must be \"cpu\" or \"gpu\", got \"" + mode + "\"");
  }

  if (!doc.contains("setup") || !doc.at("setup").is_object()) {
    throw ParseError("document needs a \"setup\" object");
  }
  const auto& setup = doc.at("setup");
  reject_unknown_fields(setup, {"memory_alloc_ms", "gpu_driver_init_ms"}, "setup", lenient);
  profile.setup.memory_alloc_ms = read_duration(setup, "memory_alloc_ms", "setup");
  if (setup.contains("gpu_driver_init_ms")) {
    profile.setup.gpu_driver_init_ms = read_duration(setup, "gpu_driver_init_ms", "setup");
  }

  if (!doc.contains("layers") || !doc.at("layers").is_array()) {
    throw ParseError("document needs a \"layers\" array");
  }
  for (const auto& l : doc.at("layers")) {
    if (!l.is_object()) throw ParseError("layers[] entries must be objects");
    reject_unknown_fields(l, {"index", "op", "preds", "kernels"}, "layer entry", lenient);
    LayerSpec layer;
    if (!l.contains("index") || !l.at("index").is_number_integer()) {
      throw ParseError("layer entry needs an integer \"index\"");
    }
    layer.layer_index = l.at("index").get<int>();
    const std::string where = "layer " + std::to_string(layer.layer_index);
    if (!l.contains("op") || !l.at("op").is_string()) {
      throw ParseError(where + " needs a string \"op\"");
    }
    layer.operator_name = l.at("op").get<std::string>();
    if (!l.contains("preds") || !l.at("preds").is_array()) {
      throw ParseError(where + " needs a \"preds\" array");
    }
    for (const auto& p : l.at("preds")) {
      if (!p.is_number_integer()) throw ParseError(where + ".preds entries must be integers");
      layer.predecessors.insert(p.get<int>());
    }
    if (!l.contains("kernels") || !l.at("kernels").is_array()) {
      throw ParseError(where + " needs a \"kernels\" array");
    }
    int ki = 0;
    for (const auto& k : l.at("kernels")) {
      layer.candidates.push_back(
          parse_kernel(k, profile.mode, where + ".kernels[" + std::to_string(ki) + "]", lenient));
      ++ki;
    }
    profile.layers.push_back(std::move(layer));
  }

  validate_profile(profile);
  return profile;
}

ModelProfile load_profile_string(const std::string& text, bool lenient) {
  std::istringstream in(text);
  return load_profile(in, lenient);
}

ModelProfile load_profile_file(const std::string& path, bool lenient) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open profile file: " + path);
  return load_profile(in, lenient);
}

std::string serialize_profile(const ModelProfile& profile) {
  ordered_json doc;
  doc["model"] = profile.model_name;
  doc["mode"] = to_string(profile.mode);
  ordered_json setup;
  setup["memory_alloc_ms"] = profile.setup.memory_alloc_ms;
  if (profile.mode == Mode::Gpu) setup["gpu_driver_init_ms"] = profile.setup.gpu_driver_init_ms;
  doc["setup"] = setup;
  ordered_json layers = ordered_json::array();
  for (const LayerSpec& layer : profile.layers) {
    ordered_json l;
    l["index"] = layer.layer_index;
    l["op"] = layer.operator_name;
    l["preds"] = layer.predecessors;
    ordered_json kernels = ordered_json::array();
    for (const KernelVariant& kv : layer.candidates) {
      ordered_json k;
      k["id"] = kv.kernel_id;
      ordered_json costs;
      costs["read_raw_ms"] = cost_pair_json(kv.read_raw_ms);
      costs["read_cached_ms"] = cost_pair_json(kv.read_cached_ms);
      costs["transform_ms"] = cost_pair_json(kv.transform_ms);
      if (profile.mode == Mode::Cpu) {
        costs["execute_ms"] = ordered_json{{"big", kv.execute_ms}};
      } else {
        costs["execute_ms"] = ordered_json{{"gpu", kv.execute_ms}};
        costs["pipeline_create_ms"] = ordered_json{{"hit", kv.pipeline_create_hit_ms},
                                                   {"miss", kv.pipeline_create_miss_ms}};
      }
      k["costs"] = costs;
      k["bytes"] = ordered_json{{"raw", kv.raw_bytes}, {"cached", kv.cached_bytes}};
      kernels.push_back(k);
    }
    l["kernels"] = kernels;
    layers.push_back(l);
  }
  doc["layers"] = layers;
  return doc.dump(2) + "\n";
}

bool operator==(const CostPair& a, const CostPair& b) {
  return a.little == b.little && a.big == b.big;
}

bool operator==(const KernelVariant& a, const KernelVariant& b) {
  return a.kernel_id == b.kernel_id && a.cached == b.cached && a.read_raw_ms == b.read_raw_ms &&
         a.read_cached_ms == b.read_cached_ms && a.transform_ms == b.transform_ms &&
         a.execute_ms == b.execute_ms && a.pipeline_create_hit_ms == b.pipeline_create_hit_ms &&
         a.pipeline_create_miss_ms == b.pipeline_create_miss_ms && a.raw_bytes == b.raw_bytes &&
         a.cached_bytes == b.cached_bytes;
}

bool operator==(const LayerSpec& a, const LayerSpec& b) {
  return a.layer_index == b.layer_index && a.operator_name == b.operator_name &&
         a.predecessors == b.predecessors && a.candidates == b.candidates;
}

bool operator==(const ModelProfile& a, const ModelProfile& b) {
  return a.model_name == b.model_name && a.mode == b.mode &&
         a.setup.memory_alloc_ms == b.setup.memory_alloc_ms &&
         a.setup.gpu_driver_init_ms == b.setup.gpu_driver_init_ms && a.layers == b.layers;
}

}  // namespace coldplan
