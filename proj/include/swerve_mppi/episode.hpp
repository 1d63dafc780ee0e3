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

#pragma once

/// @file
/// Navigation episodes: a ground-truth kinematic plant driven by one of the
/// MPPI controllers through a sequence of goals, the evaluation metrics, and
/// seeded batches with CSV output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "swerve_mppi/hybrid.hpp"
#include "swerve_mppi/kinematics.hpp"
#include "swerve_mppi/mppi.hpp"
#include "swerve_mppi/planner.hpp"
#include "swerve_mppi/world.hpp"

namespace swerve {

enum class ControllerKind { kMppi3a, kMppi3b, kMppi4, kHybrid };

inline const char* to_string(ControllerKind c) {
  switch (c) {
    case ControllerKind::kMppi3a: return "mppi3a";
    case ControllerKind::kMppi3b: return "mppi3b";
    case ControllerKind::kMppi4: return "mppi4";
    case ControllerKind::kHybrid: return "hybrid";
  }
  return "?";
}

inline ControllerKind parse_controller(const std::string& s) {
  if (s == "mppi3a") return ControllerKind::kMppi3a;
  if (s == "mppi3b") return ControllerKind::kMppi3b;
  if (s == "mppi4") return ControllerKind::kMppi4;
  if (s == "hybrid") return ControllerKind::kHybrid;
  throw ConfigError("unknown controller '" + s + "' (expected mppi3a, mppi3b, mppi4 or hybrid)");
}

struct EpisodeConfig {
  Scenario scenario{};
  ControllerKind controller = ControllerKind::kHybrid;
  int episodes = 30;
  double goal_timeout = 60.0;      ///< per goal [s]
  double control_interval = 0.05;  ///< [s]
  std::uint64_t master_seed = 0;
  int jobs = 1;  ///< episodes run concurrently in a batch

  double goal_pos_tol = 0.2;   ///< [m]
  double goal_yaw_tol = 0.2;   ///< [rad]
  double collision_margin = 0.05;  ///< added to the circumscribed radius [m]
  double planning_margin = 0.25;   ///< extra inflation for the global planner [m]
  double path_spacing = 0.1;       ///< [m]
  bool record_timing = true;

  /// Shared solver parameters; `sigma` and `space` are filled per controller.
  MppiConfig mppi{};
  std::vector<double> sigma_3d_a{1.00, 1.00, 0.78};
  std::vector<double> sigma_3d_b{0.55, 0.55, 0.96};
  std::vector<double> sigma_4d{1.00, 1.00, 0.78, 0.78};
  CostWeights weights{};
  HybridConfig hybrid{};
  VehicleGeometry geometry{};

  double collision_radius() const { return geometry.circumscribed_radius() + collision_margin; }

  void validate() const {
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (!(goal_timeout > 0.0)) throw ConfigError("goal_timeout must be positive");
    if (!(control_interval > 0.0)) throw ConfigError("control_interval must be positive");
    if (!(goal_pos_tol > 0.0) || !(goal_yaw_tol > 0.0)) throw ConfigError("goal tolerances must be positive");
    if (!(collision_margin >= 0.0) || !(planning_margin >= 0.0)) throw ConfigError("margins must be non-negative");
    if (!(path_spacing > 0.0)) throw ConfigError("path_spacing must be positive");
    geometry.validate();
    weights.validate();
    hybrid.validate();
    validate_solver(SpaceKind::k3DoF, sigma_3d_a);
    validate_solver(SpaceKind::k3DoF, sigma_3d_b);
    validate_solver(SpaceKind::k4DoF, sigma_4d);
    swerve::validate(scenario);
  }

  MppiConfig solver_config(SpaceKind space, const std::vector<double>& sigma, std::uint64_t seed) const {
    MppiConfig c = mppi;
    c.space = space;
    c.sigma = sigma;
    c.seed = seed;
    return c;
  }

 private:
  void validate_solver(SpaceKind space, const std::vector<double>& sigma) const {
    solver_config(space, sigma, 0).validate();
  }
};

// ---------------------------------------------------------------------------
// Controllers

class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControlOutput step(const Pose2& x0, const CostContext& ctx) = 0;
};

template <class Space>
class SingleSpaceController final : public Controller {
 public:
  SingleSpaceController(const MppiConfig& cfg, const VehicleGeometry& geom) : solver_(cfg, geom) {}

  ControlOutput step(const Pose2& x0, const CostContext& ctx) override {
    auto r = solver_.step(x0, ctx);
    return {r.command, Space::kKind, std::move(r.diagnostics)};
  }

  const MppiSolver<Space>& solver() const { return solver_; }

 private:
  MppiSolver<Space> solver_;
};

class HybridController final : public Controller {
 public:
  HybridController(const MppiConfig& a, const MppiConfig& b, const HybridConfig& h, const VehicleGeometry& g)
      : impl_(a, b, h, g) {}

  ControlOutput step(const Pose2& x0, const CostContext& ctx) override { return impl_.step(x0, ctx); }

  const HybridMppi& impl() const { return impl_; }

 private:
  HybridMppi impl_;
};

inline std::unique_ptr<Controller> make_controller(const EpisodeConfig& cfg, std::uint64_t seed) {
  switch (cfg.controller) {
    case ControllerKind::kMppi3a:
      return std::make_unique<SingleSpaceController<Space3>>(
          cfg.solver_config(SpaceKind::k3DoF, cfg.sigma_3d_a, seed), cfg.geometry);
    case ControllerKind::kMppi3b:
      return std::make_unique<SingleSpaceController<Space3>>(
          cfg.solver_config(SpaceKind::k3DoF, cfg.sigma_3d_b, seed), cfg.geometry);
    case ControllerKind::kMppi4:
      return std::make_unique<SingleSpaceController<Space4>>(
          cfg.solver_config(SpaceKind::k4DoF, cfg.sigma_4d, seed), cfg.geometry);
    case ControllerKind::kHybrid: {
      const auto& sigma_a = cfg.hybrid.space_a == Variant3::kA ? cfg.sigma_3d_a : cfg.sigma_3d_b;
      return std::make_unique<HybridController>(cfg.solver_config(SpaceKind::k3DoF, sigma_a, seed),
                                                cfg.solver_config(SpaceKind::k4DoF, cfg.sigma_4d, seed),
                                                cfg.hybrid, cfg.geometry);
    }
  }
  throw ConfigError("unknown controller kind");
}

// ---------------------------------------------------------------------------
// Episodes

enum class FailureKind { kNone, kCollision, kTimeout, kNoPath };

inline const char* to_string(FailureKind f) {
  switch (f) {
    case FailureKind::kNone: return "none";
    case FailureKind::kCollision: return "collision";
    case FailureKind::kTimeout: return "timeout";
    case FailureKind::kNoPath: return "no_path";
  }
  return "?";
}

struct TraceRow {
  int tick = 0;
  int goal_index = 0;
  Pose2 pose;  ///< observed pose the command was computed for
  SpaceKind mode = SpaceKind::k3DoF;
  VehicleCommand8 command;
  double solve_ms = 0.0;
  double optimal_cost = 0.0;
};

struct Trace {
  double control_interval = 0.05;
  std::vector<TraceRow> rows;
  std::vector<Pose2> poses;  ///< true poses: initial, then one per tick
  int goals_reached = 0;
  int goal_count = 0;
  FailureKind failure = FailureKind::kNone;

  bool success() const { return failure == FailureKind::kNone && goals_reached == goal_count; }
};

struct EpisodeMetrics {
  double total_cost = 0.0;
  double mean_calc_time = 0.0;      ///< [ms]
  double mean_steering_rate = 0.0;  ///< [rad/s]
  double mean_wheel_acc = 0.0;      ///< [m/s^2]
  double trajectory_length = 0.0;   ///< [m]
  double episode_time = 0.0;        ///< [s]
  bool success = false;
};

/// Steering rate and wheel acceleration average |change| / interval over
/// consecutive commands and the four wheels; cost and calc time average over
/// ticks.
inline EpisodeMetrics compute_metrics(const Trace& trace) {
  EpisodeMetrics m;
  const std::size_t n = trace.rows.size();
  const double dt = trace.control_interval;
  if (n > 0) {
    double cost = 0.0;
    double calc = 0.0;
    for (const auto& r : trace.rows) {
      cost += r.optimal_cost;
      calc += r.solve_ms;
    }
    m.total_cost = cost / static_cast<double>(n);
    m.mean_calc_time = calc / static_cast<double>(n);
  }
  if (n > 1) {
    double steer = 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      for (int w = 0; w < 4; ++w) {
        steer += std::abs(trace.rows[i].command.delta[w] - trace.rows[i - 1].command.delta[w]) / dt;
        acc += std::abs(trace.rows[i].command.speed[w] - trace.rows[i - 1].command.speed[w]) / dt;
      }
    }
    const double count = 4.0 * static_cast<double>(n - 1);
    m.mean_steering_rate = steer / count;
    m.mean_wheel_acc = acc / count;
  }
  for (std::size_t i = 1; i < trace.poses.size(); ++i) {
    m.trajectory_length += std::hypot(trace.poses[i].x - trace.poses[i - 1].x,
                                      trace.poses[i].y - trace.poses[i - 1].y);
  }
  m.episode_time = static_cast<double>(n) * dt;
  m.success = trace.success();
  return m;
}

struct EpisodeResult {
  int index = 0;
  std::uint64_t seed = 0;
  EpisodeMetrics metrics;
  FailureKind failure = FailureKind::kNone;
  Trace trace;
};

inline bool goal_reached(const Pose2& p, const Pose2& goal, const EpisodeConfig& cfg) {
  return std::hypot(p.x - goal.x, p.y - goal.y) < cfg.goal_pos_tol &&
         std::abs(wrap_angle(p.theta - goal.theta)) < cfg.goal_yaw_tol;
}

/// Plans on the padded grid, falling back to the collision grid when the
/// padding closes every passage.
inline ReferencePath plan_leg(const InflatedGrid& planning_grid, const InflatedGrid& collision_grid,
                              const Pose2& from, const Pose2& goal, const PlannerOptions& opt) {
  try {
    return plan(planning_grid, from, goal, opt);
  } catch (const NoPathError&) {
    return plan(collision_grid, from, goal, opt);
  }
}

/// Runs `controller` through every goal of `world`. The plant applies the
/// center twist implied by each emitted command for one control interval.
inline Trace simulate(const EpisodeConfig& cfg, const GeneratedWorld& world, Controller& controller) {
  const InflatedGrid collision_grid = inflate(world.grid, cfg.collision_radius());
  const InflatedGrid planning_grid = inflate(world.grid, cfg.collision_radius() + cfg.planning_margin);
  const PlannerOptions popt{cfg.path_spacing};
  const long max_ticks_per_goal = static_cast<long>(std::ceil(cfg.goal_timeout / cfg.control_interval - 1e-9));

  Trace trace;
  trace.control_interval = cfg.control_interval;
  trace.goal_count = static_cast<int>(world.goals.size());
  Pose2 pose = world.start;
  trace.poses.push_back(pose);
  int tick = 0;

  for (std::size_t gi = 0; gi < world.goals.size(); ++gi) {
    const Pose2& goal = world.goals[gi];
    // Legs start at the previous goal rather than the exact pose, so the
    // path is the nominal leg whose arrival direction set the goal yaw.
    const Pose2& from = gi == 0 ? world.start : world.goals[gi - 1];
    ReferencePath path;
    try {
      path = plan_leg(planning_grid, collision_grid, from, goal, popt);
    } catch (const NoPathError&) {
      trace.failure = FailureKind::kNoPath;
      return trace;
    }
    const CostContext ctx{&collision_grid, &path, goal, cfg.weights, cfg.geometry};
    long ticks_here = 0;
    while (!goal_reached(pose, goal, cfg)) {
      if (ticks_here >= max_ticks_per_goal) {
        trace.failure = FailureKind::kTimeout;
        return trace;
      }
      ControlOutput out = controller.step(pose, ctx);
      trace.rows.push_back({tick, static_cast<int>(gi), pose, out.mode, out.command,
                            cfg.record_timing ? out.diagnostics.solve_ms : 0.0,
                            out.diagnostics.optimal_cost});
      pose = propagate(pose, command_to_control3(out.command, cfg.geometry), cfg.control_interval);
      trace.poses.push_back(pose);
      ++tick;
      ++ticks_here;
      if (in_collision(collision_grid, pose)) {
        trace.failure = FailureKind::kCollision;
        return trace;
      }
    }
    ++trace.goals_reached;
  }
  return trace;
}

inline std::uint64_t episode_seed(std::uint64_t master, int index) {
  return master ^ static_cast<std::uint64_t>(index);
}

inline GeneratedWorld episode_world(const EpisodeConfig& cfg, std::uint64_t seed) {
  Scenario sc = cfg.scenario;
  sc.seed = seed;
  // Connectivity and detours are judged on the grid the planner prefers.
  sc.collision_radius = cfg.collision_radius() + cfg.planning_margin;
  GeneratedWorld world = generate(sc);

  // Goal yaw is the direction of arrival along the nominal leg from the
  // previous goal, so the final reference orientation continues the path.
  const InflatedGrid collision_grid = inflate(world.grid, cfg.collision_radius());
  const InflatedGrid planning_grid = inflate(world.grid, cfg.collision_radius() + cfg.planning_margin);
  const PlannerOptions popt{cfg.path_spacing};
  Pose2 from = world.start;
  for (std::size_t i = 0; i < world.goals.size(); ++i) {
    Pose2& goal = world.goals[i];
    try {
      const ReferencePath leg = plan_leg(planning_grid, collision_grid, from, goal, popt);
      if (i == 0) world.start.theta = wrap_angle(departure_heading(leg));
      goal.theta = wrap_angle(arrival_heading(leg));
    } catch (const NoPathError&) {
      // Unreachable legs keep the straight-line bearing; simulate reports them.
    }
    from = goal;
  }
  return world;
}

inline EpisodeResult run_episode(const EpisodeConfig& cfg, int index) {
  cfg.validate();
  EpisodeResult r;
  r.index = index;
  r.seed = episode_seed(cfg.master_seed, index);
  const GeneratedWorld world = episode_world(cfg, r.seed);
  auto controller = make_controller(cfg, r.seed);
  r.trace = simulate(cfg, world, *controller);
  r.metrics = compute_metrics(r.trace);
  r.failure = r.trace.failure;
  if (!r.metrics.success && r.failure == FailureKind::kNone) r.failure = FailureKind::kTimeout;
  return r;
}

// ---------------------------------------------------------------------------
// Batches and CSV

struct BatchSummary {
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;  ///< [%]
  EpisodeMetrics mean;        ///< per-metric means over all episodes
};

struct BatchResult {
  std::vector<EpisodeResult> episodes;  ///< in episode-index order
  BatchSummary summary;
};

/// Summary over `episodes`, aggregated in index order whatever the input order.
inline BatchSummary summarize(std::vector<const EpisodeResult*> episodes) {
  std::sort(episodes.begin(), episodes.end(),
            [](const EpisodeResult* a, const EpisodeResult* b) { return a->index < b->index; });
  BatchSummary s;
  s.episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) return s;
  for (const auto* e : episodes) {
    const EpisodeMetrics& m = e->metrics;
    s.successes += m.success ? 1 : 0;
    s.mean.total_cost += m.total_cost;
    s.mean.mean_calc_time += m.mean_calc_time;
    s.mean.mean_steering_rate += m.mean_steering_rate;
    s.mean.mean_wheel_acc += m.mean_wheel_acc;
    s.mean.trajectory_length += m.trajectory_length;
    s.mean.episode_time += m.episode_time;
  }
  const double n = static_cast<double>(episodes.size());
  s.mean.total_cost /= n;
  s.mean.mean_calc_time /= n;
  s.mean.mean_steering_rate /= n;
  s.mean.mean_wheel_acc /= n;
  s.mean.trajectory_length /= n;
  s.mean.episode_time /= n;
  s.success_rate = 100.0 * s.successes / n;
  s.mean.success = s.successes == s.episodes;
  return s;
}

inline BatchSummary summarize(const std::vector<EpisodeResult>& episodes) {
  std::vector<const EpisodeResult*> ptrs;
  for (const auto& e : episodes) ptrs.push_back(&e);
  return summarize(std::move(ptrs));
}

/// Runs episodes 0..n-1 with seeds master ^ index, `cfg.jobs` at a time.
/// `on_episode` (optional) sees each result as it completes; the returned
/// episodes are in index order whatever the completion order.
template <class Callback>
BatchResult run_batch(const EpisodeConfig& cfg, int n, Callback&& on_episode) {
  cfg.validate();
  BatchResult b;
  b.episodes.resize(static_cast<std::size_t>(std::max(n, 0)));
#pragma omp parallel for num_threads(cfg.jobs) schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    b.episodes[static_cast<std::size_t>(i)] = run_episode(cfg, i);
#pragma omp critical(swerve_batch_callback)
    on_episode(b.episodes[static_cast<std::size_t>(i)]);
  }
  b.summary = summarize(b.episodes);
  return b;
}

inline BatchResult run_batch(const EpisodeConfig& cfg, int n) {
  return run_batch(cfg, n, [](const EpisodeResult&) {});
}

namespace detail {

inline std::string csv_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kResultsHeader =
    "episode,success,cost,calc_time_ms,steering_rate,wheel_acc,traj_len_m,episode_time_s,failure_kind";

/// One row per episode plus a `mean` row whose success column is the success
/// percentage. With `record_timing` off the calc-time column is left empty.
inline void write_results_csv(std::ostream& os, const BatchResult& b, bool record_timing = true) {
  using detail::csv_real;
  os << kResultsHeader << '\n';
  auto timing = [&](double ms) { return record_timing ? csv_real(ms) : std::string(); };
  for (const auto& e : b.episodes) {
    const EpisodeMetrics& m = e.metrics;
    os << e.index << ',' << (m.success ? 1 : 0) << ',' << csv_real(m.total_cost) << ','
       << timing(m.mean_calc_time) << ',' << csv_real(m.mean_steering_rate) << ','
       << csv_real(m.mean_wheel_acc) << ',' << csv_real(m.trajectory_length) << ','
       << csv_real(m.episode_time) << ',' << to_string(e.failure) << '\n';
  }
  const BatchSummary& s = b.summary;
  os << "mean," << csv_real(s.success_rate) << ',' << csv_real(s.mean.total_cost) << ','
     << timing(s.mean.mean_calc_time) << ',' << csv_real(s.mean.mean_steering_rate) << ','
     << csv_real(s.mean.mean_wheel_acc) << ',' << csv_real(s.mean.trajectory_length) << ','
     << csv_real(s.mean.episode_time) << ",\n";
}

/// Per-tick trace: pose, mode, the 8 command values and solve time.
inline void write_trace_csv(std::ostream& os, const Trace& trace, bool record_timing = true) {
  using detail::csv_real;
  os << "tick,goal,x,y,theta,mode,delta_fl,delta_fr,delta_rl,delta_rr,v_fl,v_fr,v_rl,v_rr,solve_ms,"
        "optimal_cost\n";
  for (const auto& r : trace.rows) {
    os << r.tick << ',' << r.goal_index << ',' << csv_real(r.pose.x) << ',' << csv_real(r.pose.y) << ','
       << csv_real(r.pose.theta) << ',' << to_string(r.mode);
    for (double d : r.command.delta) os << ',' << csv_real(d);
    for (double v : r.command.speed) os << ',' << csv_real(v);
    os << ',' << (record_timing ? csv_real(r.solve_ms) : std::string()) << ',' << csv_real(r.optimal_cost)
       << '\n';
  }
}

}  // namespace swerve
