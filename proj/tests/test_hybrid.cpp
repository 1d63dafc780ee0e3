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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "swerve_mppi/hybrid.hpp"

namespace swerve {
namespace {

const VehicleGeometry kGeom{};

TEST(SelectMode, Thresholds) {
  const HybridConfig h;
  EXPECT_EQ(select_mode(0.1, 0.1, h), SpaceKind::k3DoF);
  EXPECT_EQ(select_mode(0.5, 0.1, h), SpaceKind::k4DoF);
  EXPECT_EQ(select_mode(0.1, 0.5, h), SpaceKind::k4DoF);
  EXPECT_EQ(select_mode(0.3, 0.3, h), SpaceKind::k4DoF);
  EXPECT_EQ(select_mode(0.2999, 0.2999, h), SpaceKind::k3DoF);
}

TEST(SelectMode, HysteresisOnlyAppliesWhenLeavingFourDof) {
  HybridConfig h;
  h.hysteresis = 0.1;
  EXPECT_EQ(select_mode(0.25, 0.1, h, SpaceKind::k3DoF), SpaceKind::k3DoF);
  EXPECT_EQ(select_mode(0.25, 0.1, h, SpaceKind::k4DoF), SpaceKind::k4DoF);
  EXPECT_EQ(select_mode(0.15, 0.1, h, SpaceKind::k4DoF), SpaceKind::k3DoF);
  h.hysteresis = -1.0;
  EXPECT_THROW(h.validate(), ConfigError);
}

TEST(Convert3To4, StraightRow) {
  const auto U4 = convert_3_to_4({{1.0, 0.0, 0.0}}, kGeom);
  ASSERT_EQ(U4.size(), 1u);
  EXPECT_NEAR(U4[0][0], 1.0, 1e-12);
  EXPECT_NEAR(U4[0][1], 1.0, 1e-12);
  EXPECT_NEAR(U4[0][2], 0.0, 1e-12);
  EXPECT_NEAR(U4[0][3], 0.0, 1e-12);
}

TEST(Convert3To4, SingularRowHoldsSteering) {
  const auto U4 = convert_3_to_4({{1.0, 1.0, 0.0}, {0.0, 0.0, 0.0}}, kGeom);
  EXPECT_NEAR(U4[1][0], 0.0, 1e-12);
  EXPECT_NEAR(U4[1][1], 0.0, 1e-12);
  EXPECT_NEAR(U4[1][2], kPi / 4, 1e-12);
  EXPECT_NEAR(U4[1][3], kPi / 4, 1e-12);
  const auto first = convert_3_to_4({{0.0, 0.0, 0.0}}, kGeom);
  EXPECT_EQ(first[0], (Space4::Row{0, 0, 0, 0}));
}

TEST(Convert3To4, PureRotationRoundTrips) {
  const auto U4 = convert_3_to_4({{0.0, 0.0, 1.0}}, kGeom);
  // Front-left moves along (-0.5, 0.5): folded to -pi/4 with negative speed.
  EXPECT_NEAR(U4[0][0], -std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(U4[0][2], -kPi / 4, 1e-12);
  // Rear-right moves along (0.5, -0.5).
  EXPECT_NEAR(U4[0][1], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(U4[0][3], -kPi / 4, 1e-12);
  const auto U3 = convert_4_to_3(U4, kGeom, {});
  EXPECT_NEAR(U3[0][0], 0.0, 1e-12);
  EXPECT_NEAR(U3[0][1], 0.0, 1e-12);
  EXPECT_NEAR(U3[0][2], 1.0, 1e-12);
}

TEST(Convert4To3, Rows) {
  const auto U3 = convert_4_to_3({{1, 1, 0, 0}, {0, 0, 0.7, 0.7}}, kGeom, {});
  EXPECT_NEAR(U3[0][0], 1.0, 1e-12);
  EXPECT_NEAR(U3[0][1], 0.0, 1e-12);
  EXPECT_NEAR(U3[0][2], 0.0, 1e-12);
  EXPECT_EQ(U3[1], (Space3::Row{0, 0, 0}));
}

TEST(Convert4To3, ResultIsClamped) {
  const auto U3 = convert_4_to_3({{-2, 2, 1.58, 1.58}}, kGeom, {});
  EXPECT_LE(std::abs(U3[0][2]), 1.58);
}

TEST(Conversion, RoundTripRecoversSequence) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> v(-2.0, 2.0), w(-1.58, 1.58);
  ControlSequence<Space3> U3(500);
  for (auto& r : U3) r = {v(rng), v(rng), w(rng)};
  const auto back = convert_4_to_3(convert_3_to_4(U3, kGeom), kGeom, {});
  for (std::size_t i = 0; i < U3.size(); ++i) {
    for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(back[i][d], U3[i][d], 1e-9);
  }
}

struct World {
  InflatedGrid grid = InflatedGrid::empty(GridFrame(120, 60, 0.1, {-1.05, -3.05, 0.0}));
  ReferencePath path;
  CostContext ctx;

  World() {
    std::vector<Pose2> p;
    for (int i = 0; i <= 80; ++i) p.push_back({0.1 * i, 0.0, 0.0});
    path = ReferencePath(p);
    ctx.grid = &grid;
    ctx.path = &path;
    ctx.goal = {8.0, 0.0, 0.0};
  }
};

MppiConfig cfg(SpaceKind s) {
  MppiConfig c;
  c.K = 128;
  c.T = 10;
  c.space = s;
  c.seed = 5;
  c.sigma = s == SpaceKind::k3DoF ? std::vector<double>{1.0, 1.0, 0.78} : std::vector<double>{1.0, 1.0, 0.78, 0.78};
  return c;
}

TEST(HybridMppi, LargeThresholdsBehaveLikeThreeDof) {
  World w;
  HybridConfig h;
  h.d_thresh = 1e9;
  h.theta_thresh = 1e9;
  HybridMppi hy(cfg(SpaceKind::k3DoF), cfg(SpaceKind::k4DoF), h, kGeom);
  MppiSolver<Space3> pure(cfg(SpaceKind::k3DoF), kGeom);
  Pose2 a{0, 0.1, 0.1}, b = a;
  for (int i = 0; i < 20; ++i) {
    const ControlOutput o = hy.step(a, w.ctx);
    const auto r = pure.step(b, w.ctx);
    EXPECT_EQ(o.mode, SpaceKind::k3DoF);
    ASSERT_EQ(o.command, r.command);
    a = propagate(a, command_to_control3(o.command, kGeom), 0.05);
    b = propagate(b, command_to_control3(r.command, kGeom), 0.05);
  }
}

TEST(HybridMppi, ZeroThresholdsBehaveLikeFourDof) {
  World w;
  HybridConfig h;
  h.d_thresh = 0.0;
  h.theta_thresh = 0.0;
  HybridMppi hy(cfg(SpaceKind::k3DoF), cfg(SpaceKind::k4DoF), h, kGeom);
  MppiSolver<Space4> pure(cfg(SpaceKind::k4DoF), kGeom);
  Pose2 a{0, 0.1, 0.1}, b = a;
  for (int i = 0; i < 20; ++i) {
    const ControlOutput o = hy.step(a, w.ctx);
    const auto r = pure.step(b, w.ctx);
    EXPECT_EQ(o.mode, SpaceKind::k4DoF);
    ASSERT_EQ(o.command, r.command);
    a = propagate(a, command_to_control3(o.command, kGeom), 0.05);
    b = propagate(b, command_to_control3(r.command, kGeom), 0.05);
  }
}

TEST(HybridMppi, ForcedAlternationKeepsBothWarmStartsValid) {
  World w;
  HybridConfig h;
  h.d_thresh = 0.15;
  h.theta_thresh = 10.0;
  HybridMppi hy(cfg(SpaceKind::k3DoF), cfg(SpaceKind::k4DoF), h, kGeom);
  const ControlLimits lim;
  int switches = 0;
  SpaceKind last = SpaceKind::k3DoF;
  for (int i = 0; i < 200; ++i) {
    // Lateral offset alternates around the threshold.
    const Pose2 x{0.02 * i, (i % 3 == 0) ? 0.4 : 0.0, 0.05 * std::sin(0.3 * i)};
    const ControlOutput o = hy.step(x, w.ctx);
    if (i > 0 && o.mode != last) ++switches;
    last = o.mode;
    for (const auto& r : hy.space_a().sequence()) {
      for (double v : r) ASSERT_TRUE(std::isfinite(v));
      ASSERT_LE(std::abs(r[0]), lim.v_max);
      ASSERT_LE(std::abs(r[1]), lim.v_max);
      ASSERT_LE(std::abs(r[2]), lim.omega_max);
    }
    for (const auto& r : hy.space_b().sequence()) {
      for (double v : r) ASSERT_TRUE(std::isfinite(v));
      ASSERT_LE(std::abs(r[0]), lim.v_max);
      ASSERT_LE(std::abs(r[1]), lim.v_max);
      ASSERT_LE(std::abs(r[2]), lim.steer_max);
      ASSERT_LE(std::abs(r[3]), lim.steer_max);
    }
    const Control3 u = command_to_control3(o.command, kGeom);
    ASSERT_LE(std::hypot(u.v_x, u.v_y), lim.v_max * std::sqrt(2.0) + 1e-9);
    ASSERT_LE(std::abs(u.omega), lim.omega_max + 1e-9);
    ASSERT_TRUE(std::isfinite(o.diagnostics.optimal_cost));
  }
  EXPECT_GT(switches, 100);
}

TEST(HybridMppi, ConvertedWarmStartMatchesSolvedSequence) {
  World w;
  HybridConfig h;
  h.d_thresh = 1e9;
  h.theta_thresh = 1e9;
  HybridMppi hy(cfg(SpaceKind::k3DoF), cfg(SpaceKind::k4DoF), h, kGeom);
  hy.step({0, 0, 0}, w.ctx);
  const auto expected = convert_3_to_4(hy.space_a().sequence(), kGeom);
  const auto& got = hy.space_b().sequence();
  for (std::size_t t = 0; t < got.size(); ++t) {
    EXPECT_EQ(got[t], clamp_row<Space4>(expected[t], hy.space_b().config().limits));
  }
  EXPECT_EQ(hy.space_b().last_command(), hy.space_a().last_command());
}

}  // namespace
}  // namespace swerve
