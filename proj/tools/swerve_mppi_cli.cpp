// Copyright 2026 The swerve_mppi Authors
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

// Command-line front end: batch runs, global-path dumps and the Jacobian
// comparison.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "swerve_mppi/swerve_mppi.hpp"

namespace {

using namespace swerve;

struct CommonOptions {
  std::string scenario = "cylinder_garden";
  std::string config;
  std::optional<std::uint64_t> seed;
};

/// Scenario (builtin or file) first, then the config file on top.
EpisodeConfig load_config(const CommonOptions& o) {
  EpisodeConfig cfg;
  Scenario sc;
  if (builtin_scenario(o.scenario, sc)) {
    cfg.scenario = sc;
  } else {
    apply_config_file(cfg, o.scenario);
  }
  if (!o.config.empty()) apply_config_file(cfg, o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  return cfg;
}

int run_command(const CommonOptions& common, const std::optional<std::string>& controller,
                const std::optional<int>& episodes, const std::optional<int>& workers, const std::optional<int>& jobs,
                const std::string& out_path, const std::string& trace_dir, bool no_timing) {
  EpisodeConfig cfg = load_config(common);
  if (controller) cfg.controller = parse_controller(*controller);
  if (episodes) cfg.episodes = *episodes;
  if (workers) cfg.mppi.workers = *workers;
  if (jobs) cfg.jobs = *jobs;
  if (no_timing) cfg.record_timing = false;
  cfg.validate();
  if (!trace_dir.empty()) std::filesystem::create_directories(trace_dir);

  std::fprintf(stderr, "%s on %s, %d episodes, master seed %llu\n", to_string(cfg.controller),
               to_string(cfg.scenario.kind), cfg.episodes,
               static_cast<unsigned long long>(cfg.master_seed));
  const BatchResult batch = run_batch(cfg, cfg.episodes, [&](const EpisodeResult& e) {
    std::fprintf(stderr, "  episode %3d: %-9s goals %2d/%2d  time %6.2f s  length %6.2f m\n", e.index,
                 to_string(e.failure), e.trace.goals_reached, e.trace.goal_count, e.metrics.episode_time,
                 e.metrics.trajectory_length);
    if (!trace_dir.empty()) {
      std::ofstream tf(std::filesystem::path(trace_dir) / ("episode_" + std::to_string(e.index) + ".csv"));
      write_trace_csv(tf, e.trace, cfg.record_timing);
    }
  });
  if (out_path.empty() || out_path == "-") {
    write_results_csv(std::cout, batch, cfg.record_timing);
  } else {
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    write_results_csv(os, batch, cfg.record_timing);
  }
  const BatchSummary& s = batch.summary;
  std::fprintf(stderr,
               "success %.1f%%  cost %.1f  calc %.2f ms  steer %.3f rad/s  acc %.3f m/s^2  "
               "length %.2f m  time %.2f s\n",
               s.success_rate, s.mean.total_cost, s.mean.mean_calc_time, s.mean.mean_steering_rate,
               s.mean.mean_wheel_acc, s.mean.trajectory_length, s.mean.episode_time);
  return 0;
}

int plan_debug_command(const CommonOptions& common, int episode, int leg, const std::string& out_path,
                       const std::string& map_out) {
  EpisodeConfig cfg = load_config(common);
  cfg.validate();
  const GeneratedWorld world = episode_world(cfg, episode_seed(cfg.master_seed, episode));
  if (leg < 0 || leg >= static_cast<int>(world.goals.size())) {
    throw std::invalid_argument("--leg must lie in [0, " + std::to_string(world.goals.size()) + ")");
  }
  const Pose2 from = leg == 0 ? world.start : world.goals[static_cast<std::size_t>(leg - 1)];
  const InflatedGrid grid = inflate(world.grid, cfg.collision_radius() + cfg.planning_margin);
  const ReferencePath path = plan(grid, from, world.goals[static_cast<std::size_t>(leg)], {cfg.path_spacing});
  if (out_path.empty() || out_path == "-") {
    write_path_csv(std::cout, path);
  } else {
    std::ofstream os(out_path);
    write_path_csv(os, path);
  }
  if (!map_out.empty()) {
    std::ofstream ms(map_out);
    save_map(ms, world.grid);
  }
  std::fprintf(stderr, "leg %d: %zu waypoints, %.3f m\n", leg, path.size(), path.length());
  return 0;
}

void print_matrix(const char* title, const CommandJacobian& j, SpaceKind space) {
  static const char* kRows[8] = {"delta_fl", "delta_fr", "delta_rl", "delta_rr",
                                 "V_fl",     "V_fr",     "V_rl",     "V_rr"};
  static const char* kCols3[3] = {"V_x", "V_y", "omega"};
  static const char* kCols4[4] = {"V_fl", "V_rr", "delta_fl", "delta_rr"};
  std::printf("%s\n%10s", title, "");
  for (std::size_t c = 0; c < j.cols; ++c) std::printf("%10s", space == SpaceKind::k3DoF ? kCols3[c] : kCols4[c]);
  std::printf("\n");
  for (std::size_t r = 0; r < 8; ++r) {
    std::printf("%10s", kRows[r]);
    for (std::size_t c = 0; c < j.cols; ++c) std::printf("%10.4f", j.at(r, c));
    std::printf("\n");
  }
}

int jacobian_command(double delta, double speed, double threshold, const VehicleGeometry& geom) {
  const auto j3 = jacobian_of_projection(SpaceKind::k3DoF, uniform_point_3dof(delta, speed), geom);
  const auto j4 = jacobian_of_projection(SpaceKind::k4DoF, uniform_point_4dof(delta, speed), geom);
  std::printf("operating point: all delta = %.6f rad, all V = %.6f m/s\n\n", delta, speed);
  print_matrix("normalized J (3DoF -> command)", j3.normalized, SpaceKind::k3DoF);
  std::printf("\n");
  print_matrix("normalized J (4DoF -> command)", j4.normalized, SpaceKind::k4DoF);
  const std::size_t z3 = j3.normalized.count_below(threshold);
  const std::size_t z4 = j4.normalized.count_below(threshold);
  std::printf("\nentries with |value| < %.3g: 3DoF %zu of %zu, 4DoF %zu of %zu\n", threshold, z3,
              j3.normalized.entries.size(), z4, j4.normalized.entries.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPPI navigation for four-wheel independent drive and steering vehicles"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario, "Scenario file or builtin name (cylinder_garden, maze)");
    sub->add_option("--config", common.config, "key = value configuration file");
    sub->add_option("--seed", common.seed, "Master seed");
  };

  auto* run = app.add_subcommand("run", "Run a batch of seeded navigation episodes");
  add_common(run);
  std::optional<std::string> controller;
  std::optional<int> episodes;
  std::optional<int> workers;
  std::optional<int> jobs;
  std::string out_path;
  std::string trace_dir;
  bool no_timing = false;
  run->add_option("--controller", controller, "mppi3a | mppi3b | mppi4 | hybrid");
  run->add_option("--episodes", episodes, "Number of episodes");
  run->add_option("--workers", workers, "Rollout worker threads");
  run->add_option("--jobs", jobs, "Episodes run concurrently");
  run->add_option("--out", out_path, "Results CSV (default stdout)");
  run->add_option("--trace-dir", trace_dir, "Directory for per-episode trace CSVs");
  run->add_flag("--no-timing", no_timing, "Leave wall-clock columns empty (byte-reproducible output)");

  auto* plan_debug = app.add_subcommand("plan-debug", "Dump the global path of one episode leg as CSV");
  add_common(plan_debug);
  int episode = 0;
  int leg = 0;
  std::string path_out;
  std::string map_out;
  plan_debug->add_option("--episode", episode, "Episode index");
  plan_debug->add_option("--leg", leg, "Goal index (0 = start to first goal)");
  plan_debug->add_option("--out", path_out, "Path CSV (default stdout)");
  plan_debug->add_option("--map-out", map_out, "Also write the episode map");

  auto* jac = app.add_subcommand("jacobian", "Print normalized projection Jacobians of both sampling spaces");
  double delta = 0.25 * kPi;
  double speed = 0.7;
  double threshold = 0.05;
  VehicleGeometry geom;
  jac->add_option("--delta", delta, "Steering angle of every wheel [rad]");
  jac->add_option("--speed", speed, "Speed of every wheel [m/s]");
  jac->add_option("--threshold", threshold, "Near-zero threshold for the sparsity count");
  jac->add_option("--lf", geom.l_f);
  jac->add_option("--lr", geom.l_r);
  jac->add_option("--dl", geom.d_l);
  jac->add_option("--dr", geom.d_r);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_command(common, controller, episodes, workers, jobs, out_path, trace_dir, no_timing);
    if (*plan_debug) return plan_debug_command(common, episode, leg, path_out, map_out);
    if (*jac) {
      geom.validate();
      return jacobian_command(delta, speed, threshold, geom);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
