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

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "swerve_mppi/config.hpp"
#include "swerve_mppi/episode.hpp"

namespace swerve {
namespace {

// Emits the same body twist every tick.
class ConstantController final : public Controller {
 public:
  explicit ConstantController(Control3 u) : u_(u) {}
  ControlOutput step(const Pose2&, const CostContext& ctx) override {
    ControlOutput o;
    o.command = command_from_control3(u_, ctx.geometry, prev_);
    prev_ = o.command;
    o.diagnostics.optimal_cost = 1.0;
    return o;
  }

 private:
  Control3 u_;
  VehicleCommand8 prev_{};
};

GeneratedWorld open_world(Pose2 start, std::vector<Pose2> goals) {
  GeneratedWorld w;
  w.grid = OccupancyGrid(160, 60, 0.1);
  w.start = start;
  w.goals = std::move(goals);
  return w;
}

EpisodeConfig fast_config() {
  EpisodeConfig c;
  c.mppi.K = 64;
  c.mppi.T = 10;
  c.scenario.goal_count = 2;
  c.scenario.width_m = 12.0;
  c.scenario.height_m = 12.0;
  c.scenario.cylinder_count = 4;
  c.goal_timeout = 4.0;
  c.master_seed = 11;
  return c;
}

TEST(Simulate, StartOnGoalSucceedsImmediately) {
  const EpisodeConfig c;
  ConstantController ctl({1.0, 0.0, 0.0});
  const Trace t = simulate(c, open_world({3, 3, 0.5}, {{3, 3, 0.5}}), ctl);
  EXPECT_TRUE(t.success());
  EXPECT_TRUE(t.rows.empty());
  const EpisodeMetrics m = compute_metrics(t);
  EXPECT_TRUE(m.success);
  EXPECT_EQ(m.trajectory_length, 0.0);
  EXPECT_EQ(m.episode_time, 0.0);
}

TEST(Simulate, ZeroCommandsTimeOut) {
  EpisodeConfig c;
  c.goal_timeout = 2.0;
  ConstantController ctl({0.0, 0.0, 0.0});
  const Trace t = simulate(c, open_world({3, 3, 0}, {{6, 3, 0}}), ctl);
  EXPECT_EQ(t.failure, FailureKind::kTimeout);
  EXPECT_FALSE(t.success());
  EXPECT_EQ(t.rows.size(), 40u);
  EXPECT_FALSE(compute_metrics(t).success);
}

TEST(Simulate, StraightDriveMetrics) {
  EpisodeConfig c;
  ConstantController ctl({2.0, 0.0, 0.0});
  const Trace t = simulate(c, open_world({2, 3, 0}, {{12, 3, 0}}), ctl);
  ASSERT_TRUE(t.success());
  const EpisodeMetrics m = compute_metrics(t);
  EXPECT_NEAR(m.trajectory_length, 10.0, 0.1 + c.goal_pos_tol);
  EXPECT_NEAR(m.episode_time, 5.0, c.control_interval + c.goal_pos_tol / 2.0);
  EXPECT_EQ(m.mean_steering_rate, 0.0);
  EXPECT_EQ(m.mean_wheel_acc, 0.0);
  EXPECT_EQ(m.total_cost, 1.0);
}

TEST(Simulate, DrivingIntoObstacleIsCollision) {
  EpisodeConfig c;
  GeneratedWorld w = open_world({2, 3, 0}, {{12, 3, 0}});
  // Wall across the straight line with a passage near the top.
  for (int y = 0; y < 35; ++y) w.grid.set_occupied({60, y});
  ConstantController ctl({2.0, 0.0, 0.0});
  const Trace t = simulate(c, w, ctl);
  EXPECT_EQ(t.failure, FailureKind::kCollision);
}

TEST(Simulate, UnreachableGoalIsNoPath) {
  EpisodeConfig c;
  GeneratedWorld w = open_world({2, 3, 0}, {{12, 3, 0}});
  for (int y = 0; y < 60; ++y) w.grid.set_occupied({60, y});
  // Wall plus border: the goal side is closed off.
  for (int x = 0; x < 160; ++x) {
    w.grid.set_occupied({x, 0});
    w.grid.set_occupied({x, 59});
  }
  ConstantController ctl({0.0, 0.0, 0.0});
  EXPECT_EQ(simulate(c, w, ctl).failure, FailureKind::kNoPath);
}

TEST(ComputeMetrics, HandBuiltTrace) {
  Trace t;
  t.control_interval = 0.05;
  t.goal_count = 1;
  t.goals_reached = 1;
  VehicleCommand8 a, b, d;
  a.delta = {0.0, 0.0, 0.0, 0.0};
  a.speed = {1.0, 1.0, 1.0, 1.0};
  b.delta = {0.1, -0.1, 0.0, 0.2};
  b.speed = {1.5, 1.0, 0.5, 1.0};
  d.delta = {0.1, -0.1, 0.0, 0.2};
  d.speed = {1.5, 1.0, 0.5, 2.0};
  t.rows = {{0, 0, {}, SpaceKind::k3DoF, a, 10.0, 3.0},
            {1, 0, {}, SpaceKind::k4DoF, b, 20.0, 6.0},
            {2, 0, {}, SpaceKind::k3DoF, d, 30.0, 9.0}};
  t.poses = {{0, 0, 0}, {3, 4, 0}, {3, 4, 0}, {3, 5, 0}};
  const EpisodeMetrics m = compute_metrics(t);
  // Steering: |dδ| sums 0.4 then 0, over 8 wheel-intervals of 0.05 s.
  EXPECT_NEAR(m.mean_steering_rate, 0.4 / 0.05 / 8.0, 1e-12);
  // Speed: |dV| sums 1.0 then 1.0.
  EXPECT_NEAR(m.mean_wheel_acc, 2.0 / 0.05 / 8.0, 1e-12);
  EXPECT_NEAR(m.trajectory_length, 6.0, 1e-12);
  EXPECT_NEAR(m.episode_time, 0.15, 1e-12);
  EXPECT_NEAR(m.total_cost, 6.0, 1e-12);
  EXPECT_NEAR(m.mean_calc_time, 20.0, 1e-12);
  EXPECT_TRUE(m.success);
}

TEST(ComputeMetrics, ConstantCommandIsSmooth) {
  Trace t;
  VehicleCommand8 c;
  c.delta = {0.3, 0.3, 0.3, 0.3};
  c.speed = {1, 1, 1, 1};
  for (int i = 0; i < 10; ++i) t.rows.push_back({i, 0, {}, SpaceKind::k4DoF, c, 1.0, 1.0});
  const EpisodeMetrics m = compute_metrics(t);
  EXPECT_EQ(m.mean_steering_rate, 0.0);
  EXPECT_EQ(m.mean_wheel_acc, 0.0);
}

EpisodeResult fake(int index, bool success, double time) {
  EpisodeResult r;
  r.index = index;
  r.metrics.success = success;
  r.metrics.episode_time = time;
  r.metrics.total_cost = 2.0 * time;
  r.metrics.trajectory_length = index;
  r.failure = success ? FailureKind::kNone : FailureKind::kTimeout;
  return r;
}

TEST(Summarize, SingleEpisodeIsItsOwnSummary) {
  const BatchSummary s = summarize(std::vector<EpisodeResult>{fake(0, true, 12.5)});
  EXPECT_EQ(s.success_rate, 100.0);
  EXPECT_EQ(s.mean.episode_time, 12.5);
  EXPECT_EQ(s.mean.total_cost, 25.0);
}

TEST(Summarize, SuccessRateAndOrderIndependence) {
  std::vector<EpisodeResult> v{fake(0, true, 1.0), fake(1, false, 2.0), fake(2, true, 3.0), fake(3, false, 4.5)};
  const BatchSummary s = summarize(v);
  EXPECT_EQ(s.success_rate, 50.0);
  EXPECT_EQ(s.successes, 2);
  EXPECT_NEAR(s.mean.episode_time, 2.625, 1e-15);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    const BatchSummary t = summarize(v);
    EXPECT_EQ(t.success_rate, s.success_rate);
    EXPECT_EQ(t.mean.episode_time, s.mean.episode_time);
    EXPECT_EQ(t.mean.total_cost, s.mean.total_cost);
    EXPECT_EQ(t.mean.trajectory_length, s.mean.trajectory_length);
  }
}

TEST(RunEpisode, RepeatedRunIsBitIdentical) {
  EpisodeConfig c = fast_config();
  c.controller = ControllerKind::kHybrid;
  c.record_timing = false;
  const EpisodeResult a = run_episode(c, 1);
  const EpisodeResult b = run_episode(c, 1);
  ASSERT_EQ(a.trace.rows.size(), b.trace.rows.size());
  EXPECT_EQ(a.trace.poses, b.trace.poses);
  EXPECT_EQ(a.metrics.total_cost, b.metrics.total_cost);
  EXPECT_EQ(a.metrics.mean_steering_rate, b.metrics.mean_steering_rate);
  EXPECT_EQ(a.metrics.trajectory_length, b.metrics.trajectory_length);
  EXPECT_EQ(a.failure, b.failure);
  std::ostringstream ta, tb;
  write_trace_csv(ta, a.trace, false);
  write_trace_csv(tb, b.trace, false);
  EXPECT_EQ(ta.str(), tb.str());
}

TEST(RunEpisode, MetricsFiniteAndNonNegative) {
  EpisodeConfig c = fast_config();
  for (ControllerKind k : {ControllerKind::kMppi3a, ControllerKind::kMppi4}) {
    c.controller = k;
    const EpisodeMetrics m = run_episode(c, 0).metrics;
    for (double v : {m.total_cost, m.mean_calc_time, m.mean_steering_rate, m.mean_wheel_acc,
                     m.trajectory_length, m.episode_time}) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
    }
  }
}

TEST(RunEpisode, LongerTimeoutKeepsSuccess) {
  EpisodeConfig c = fast_config();
  c.controller = ControllerKind::kMppi4;
  c.goal_timeout = 20.0;
  const EpisodeResult a = run_episode(c, 0);
  c.goal_timeout = 40.0;
  const EpisodeResult b = run_episode(c, 0);
  if (a.metrics.success) {
    EXPECT_TRUE(b.metrics.success);
    EXPECT_EQ(a.trace.poses, b.trace.poses);
  }
}

TEST(RunBatch, CsvLayout) {
  EpisodeConfig c = fast_config();
  c.controller = ControllerKind::kMppi3b;
  c.goal_timeout = 2.0;
  const BatchResult b = run_batch(c, 2);
  std::ostringstream os;
  write_results_csv(os, b, false);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "episode,success,cost,calc_time_ms,steering_rate,wheel_acc,traj_len_m,episode_time_s,failure_kind");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    EXPECT_NE(line.find(",,"), std::string::npos);  // empty timing column
  }
  EXPECT_EQ(rows, 3);
  EXPECT_EQ(b.episodes[1].seed, 11u ^ 1u);
}

TEST(RunBatch, ConcurrentEpisodesKeepIndexOrderAndResults) {
  EpisodeConfig c = fast_config();
  c.controller = ControllerKind::kMppi3a;
  c.goal_timeout = 2.0;
  c.record_timing = false;
  const BatchResult serial = run_batch(c, 4);
  c.jobs = 3;
  std::vector<int> seen;
  const BatchResult parallel = run_batch(c, 4, [&](const EpisodeResult& e) { seen.push_back(e.index); });
  std::ostringstream a, b;
  write_results_csv(a, serial, false);
  write_results_csv(b, parallel, false);
  EXPECT_EQ(a.str(), b.str());
  for (int i = 0; i < 4; ++i) EXPECT_EQ(parallel.episodes[static_cast<std::size_t>(i)].index, i);
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3}));
  c.jobs = 0;
  EXPECT_THROW(run_batch(c, 1), ConfigError);
}

TEST(Config, ParsesKnownKeysAndRejectsUnknown) {
  EpisodeConfig c;
  apply_config_text(c, "# comment\nK = 100   # trailing\nsigma_4d = 1, 2, 3, 4\ncontroller = mppi3b\nkind = maze\n");
  EXPECT_EQ(c.mppi.K, 100);
  EXPECT_EQ(c.sigma_4d, (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(c.controller, ControllerKind::kMppi3b);
  EXPECT_EQ(c.scenario.kind, ScenarioKind::kMaze);
  EXPECT_THROW(apply_config_text(c, "no_such_key = 1\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "K = ten\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "K 10\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "controller = pid\n"), ConfigError);
  EpisodeConfig bad;
  apply_config_text(bad, "sigma_4d = 1, 1, 1\n");
  EXPECT_THROW(bad.validate(), ConfigError);
}

}  // namespace
}  // namespace swerve
