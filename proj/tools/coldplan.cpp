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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coldplan/oracle.hpp"
#include "coldplan/report.hpp"
#include "coldplan/warm.hpp"

namespace {

using namespace coldplan;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string profile_path;
  int little = 2;
  int big = 4;
  double disk_cap = 1.5;
  double mem_cap = 3.0;
  std::string load_path;
  std::string steal = "off";
  bool gpu = false;
  std::string shader_cache = "off";
  bool lenient = false;
  bool no_cache = false;
  std::string combo_strategy = "exhaustive";
  std::uint64_t seed = 0;
};

void add_platform_flags(CLI::App* cmd, CommonFlags* flags, bool with_load = true) {
  cmd->add_option("--little", flags->little, "Number of little cores (M_l)");
  cmd->add_option("--big", flags->big, "Number of big cores in the cluster (M_b)");
  cmd->add_option("--disk-cap", flags->disk_cap, "Disk parallel-read effectiveness");
  cmd->add_option("--mem-cap", flags->mem_cap, "Memory bandwidth effectiveness");
  // Background load is a runtime event; planning-only commands do not take it.
  if (with_load) cmd->add_option("--load", flags->load_path, "Background load trace (JSON)");
  cmd->add_flag("--lenient", flags->lenient, "Accept unknown profile fields");
  cmd->add_flag("--gpu", flags->gpu, "Require a GPU-mode profile");
}

PlatformConfig make_platform(const CommonFlags& flags) {
  PlatformConfig platform;
  platform.little_cores = flags.little;
  platform.big_cores = flags.big;
  platform.disk_capacity = flags.disk_cap;
  platform.mem_capacity = flags.mem_cap;
  if (!flags.load_path.empty()) platform.background_load = load_trace_from_file(flags.load_path);
  platform.validate();
  return platform;
}

SchedulerConfig make_scheduler_config(const CommonFlags& flags) {
  SchedulerConfig cfg;
  cfg.allow_cache = !flags.no_cache;
  cfg.shader_cache = flags.shader_cache == "on";
  if (flags.combo_strategy == "exhaustive") {
    cfg.strategy = ComboStrategy::Exhaustive;
  } else if (flags.combo_strategy == "greedy") {
    cfg.strategy = ComboStrategy::Greedy;
  } else if (flags.combo_strategy.rfind("beam:", 0) == 0) {
    cfg.strategy = ComboStrategy::Beam;
    cfg.beam_width = std::stoi(flags.combo_strategy.substr(5));
    if (cfg.beam_width < 1) throw ValidationError("beam width must be >= 1");
  } else {
    throw ValidationError("unknown combo strategy: " + flags.combo_strategy +
                          " (use exhaustive, greedy, or beam:K)");
  }
  return cfg;
}

ModelProfile load_checked(const CommonFlags& flags) {
  ModelProfile profile = load_profile_file(flags.profile_path, flags.lenient);
  if (flags.gpu && profile.mode != Mode::Gpu) {
    throw ValidationError("--gpu given but profile is CPU-mode");
  }
  return profile;
}

int cmd_plan(const CommonFlags& flags, bool continuous, bool explain) {
  const ModelProfile profile = load_checked(flags);
  const PlatformConfig platform = make_platform(flags);
  const SchedulerConfig cfg = make_scheduler_config(flags);
  const Plan plan = generate_plan(profile, platform, cfg);

  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(plan_to_json(plan));
  if (explain) {
    nlohmann::ordered_json fronts = nlohmann::ordered_json::array();
    for (const auto& front : candidate_fronts(profile, cfg.allow_cache)) {
      nlohmann::ordered_json layer = nlohmann::ordered_json::array();
      for (const VariantScore& v : front) {
        layer.push_back(nlohmann::ordered_json{{"kernel", v.variant.kernel_id},
                                               {"cached", v.variant.cached},
                                               {"prep_little_ms", v.prep_little_ms},
                                               {"exec_ms", v.exec_ms}});
      }
      fronts.push_back(layer);
    }
    doc["fronts"] = fronts;
  }
  if (continuous) {
    OperationGraph graph = build_operation_graph(profile, plan.combo);
    SimOptions options;
    options.shader_cache = cfg.shader_cache;
    const SimReport report = simulate(plan, graph, platform, options);
    const WarmSwitchPlan wsp = plan_warm_switch(plan, report, profile, platform, cfg.allow_cache);
    const Ms second = second_inference_latency(wsp, profile, platform, cfg);
    doc["warm_switch"] =
        nlohmann::ordered_json::parse(warm_switch_to_json(wsp, second, warm_execute_sum(wsp)));
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const CommonFlags& flags, const std::string& gantt_path) {
  const ModelProfile profile = load_checked(flags);
  const PlatformConfig platform = make_platform(flags);
  const SchedulerConfig cfg = make_scheduler_config(flags);
  // The plan is generated offline; background load is a runtime event.
  PlatformConfig offline = platform;
  offline.background_load.clear();
  const Plan plan = generate_plan(profile, offline, cfg);
  OperationGraph graph = build_operation_graph(profile, plan.combo);
  SimOptions options;
  options.stealing = flags.steal == "on";
  options.shader_cache = flags.shader_cache == "on";
  const SimReport report = simulate(plan, graph, platform, options);
  if (!gantt_path.empty()) {
    std::ofstream out(gantt_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + gantt_path);
    write_gantt_csv(out, report, graph);
    if (!out) throw IoError("failed writing output file: " + gantt_path);
  }
  std::cout << report_summary_json(report, graph);
  return 0;
}

int cmd_ablate(const CommonFlags& flags) {
  const ModelProfile profile = load_checked(flags);
  const PlatformConfig platform = make_platform(flags);
  const SchedulerConfig cfg = make_scheduler_config(flags);
  std::cout << ablation_to_json(run_ablation(profile, platform, cfg));
  return 0;
}

int cmd_oracle(const CommonFlags& flags, int random_count) {
  const PlatformConfig platform = make_platform(flags);
  const SchedulerConfig cfg = make_scheduler_config(flags);
  nlohmann::ordered_json results = nlohmann::ordered_json::array();

  auto run_one = [&](const ModelProfile& profile, const std::string& name) {
    const Plan heuristic = generate_plan(profile, platform, cfg);
    OperationGraph graph = build_operation_graph(profile, heuristic.combo);
    const OracleResult opt = optimal_schedule(graph, heuristic.combo, platform);
    const Ms sequential = sequential_baseline(profile, heuristic.combo);
    nlohmann::ordered_json row;
    row["instance"] = name;
    row["optimal_ms"] = opt.makespan_ms;
    row["heuristic_ms"] = heuristic.predicted_makespan_ms;
    row["sequential_ms"] = sequential;
    row["gap_ratio"] =
        opt.makespan_ms > 0.0 ? heuristic.predicted_makespan_ms / opt.makespan_ms : 1.0;
    row["optimal_certified"] = opt.optimal;
    results.push_back(row);
  };

  if (!flags.profile_path.empty()) {
    run_one(load_checked(flags), flags.profile_path);
  }
  for (int k = 0; k < random_count; ++k) {
    const std::uint64_t seed = flags.seed + static_cast<std::uint64_t>(k);
    run_one(random_profile(seed), "seed-" + std::to_string(seed));
  }
  if (results.empty()) {
    throw ValidationError("oracle needs a profile path or --random COUNT");
  }
  nlohmann::ordered_json doc;
  doc["results"] = results;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_export_gantt(const CommonFlags& flags, const std::string& out_path) {
  const ModelProfile profile = load_checked(flags);
  const PlatformConfig platform = make_platform(flags);
  const SchedulerConfig cfg = make_scheduler_config(flags);
  PlatformConfig offline = platform;
  offline.background_load.clear();
  const Plan plan = generate_plan(profile, offline, cfg);
  OperationGraph graph = build_operation_graph(profile, plan.combo);
  SimOptions options;
  options.stealing = flags.steal == "on";
  options.shader_cache = flags.shader_cache == "on";
  const SimReport report = simulate(plan, graph, platform, options);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + out_path);
  write_gantt_csv(out, report, graph);
  out.flush();
  if (!out) throw IoError("failed writing output file: " + out_path);
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Kernel scheduling and pipeline simulation for DNN cold inference"};
  app.require_subcommand(1);

  CommonFlags flags;
  bool continuous = false;
  bool explain = false;
  std::string gantt_path;
  std::string out_path;
  int random_count = 0;

  CLI::App* plan = app.add_subcommand("plan", "Generate a kernel scheduling plan");
  plan->add_option("profile", flags.profile_path, "Profile document")->required();
  add_platform_flags(plan, &flags, /*with_load=*/false);
  plan->add_flag("--no-cache", flags.no_cache, "Disable post-transformed weight caching");
  plan->add_option("--combo-strategy", flags.combo_strategy, "exhaustive | greedy | beam:K");
  plan->add_option("--shader-cache", flags.shader_cache, "GPU shader cache: on | off")
      ->check(CLI::IsMember({"on", "off"}));
  plan->add_flag("--continuous", continuous, "Also plan warm-inference kernel switching");
  plan->add_flag("--explain", explain, "Include per-layer Pareto fronts");
  plan->add_option("--seed", flags.seed, "Random seed (oracle harness only)");

  CLI::App* sim = app.add_subcommand("simulate", "Plan and simulate a profile");
  sim->add_option("profile", flags.profile_path, "Profile document")->required();
  add_platform_flags(sim, &flags);
  sim->add_flag("--no-cache", flags.no_cache, "Disable post-transformed weight caching");
  sim->add_option("--combo-strategy", flags.combo_strategy, "exhaustive | greedy | beam:K");
  sim->add_option("--steal", flags.steal, "Workload stealing: on | off")
      ->check(CLI::IsMember({"on", "off"}));
  sim->add_option("--shader-cache", flags.shader_cache, "GPU shader cache: on | off")
      ->check(CLI::IsMember({"on", "off"}));
  sim->add_option("--gantt", gantt_path, "Also write the Gantt CSV here");

  CLI::App* ablate = app.add_subcommand("ablate", "Makespans for baseline, K, K+C, K+C+P");
  ablate->add_option("profile", flags.profile_path, "Profile document")->required();
  add_platform_flags(ablate, &flags);

  CLI::App* oracle = app.add_subcommand("oracle", "Optimal vs heuristic on small instances");
  oracle->add_option("profile", flags.profile_path, "Profile document");
  add_platform_flags(oracle, &flags);
  oracle->add_option("--random", random_count, "Also run COUNT random instances");
  oracle->add_option("--seed", flags.seed, "Seed for random instances");

  CLI::App* gantt = app.add_subcommand("export-gantt", "Plan, simulate, and write a Gantt CSV");
  gantt->add_option("profile", flags.profile_path, "Profile document")->required();
  gantt->add_option("out", out_path, "Output CSV path")->required();
  add_platform_flags(gantt, &flags);
  gantt->add_flag("--no-cache", flags.no_cache, "Disable post-transformed weight caching");
  gantt->add_option("--combo-strategy", flags.combo_strategy, "exhaustive | greedy | beam:K");
  gantt->add_option("--steal", flags.steal, "Workload stealing: on | off")
      ->check(CLI::IsMember({"on", "off"}));
  gantt->add_option("--shader-cache", flags.shader_cache, "GPU shader cache: on | off")
      ->check(CLI::IsMember({"on", "off"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) return cmd_plan(flags, continuous, explain);
    if (sim->parsed()) return cmd_simulate(flags, gantt_path);
    if (ablate->parsed()) return cmd_ablate(flags);
    if (oracle->parsed()) return cmd_oracle(flags, random_count);
    if (gantt->parsed()) return cmd_export_gantt(flags, out_path);
  } catch (const ComboSpaceExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
