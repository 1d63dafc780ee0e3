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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swerve_mppi/world.hpp"

namespace swerve {
namespace {

constexpr double kRes = 0.1;

OccupancyGrid random_grid(std::uint64_t seed, int w, int h, double p) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution occ(p);
  OccupancyGrid g(w, h, kRes);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g.set_occupied({x, y}, occ(rng));
  }
  return g;
}

TEST(Generate, SameSeedGivesIdenticalWorld) {
  Scenario sc;
  sc.seed = 7;
  const GeneratedWorld a = generate(sc);
  const GeneratedWorld b = generate(sc);
  EXPECT_EQ(a.grid, b.grid);
  EXPECT_EQ(map_to_string(a.grid), map_to_string(b.grid));
  EXPECT_EQ(a.start, b.start);
  ASSERT_EQ(a.goals.size(), 10u);
  EXPECT_EQ(a.goals, b.goals);
}

TEST(Generate, DifferentSeedsDiffer) {
  Scenario sc;
  sc.seed = 7;
  const GeneratedWorld a = generate(sc);
  sc.seed = 8;
  const GeneratedWorld b = generate(sc);
  EXPECT_NE(a.grid, b.grid);
}

TEST(Generate, NoObstaclesGivesAllFreeGrid) {
  Scenario sc;
  sc.cylinder_count = 0;
  sc.border = false;
  const GeneratedWorld w = generate(sc);
  EXPECT_EQ(w.grid.occupied_count(), 0u);
  EXPECT_EQ(w.rounds, 1);
}

TEST(Generate, GoalsAreSeparatedFreeAndBounded) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Scenario sc;
    sc.seed = seed;
    const GeneratedWorld w = generate(sc);
    const InflatedGrid lethal = inflate(w.grid, sc.collision_radius);
    std::vector<Pose2> pts{w.start};
    pts.insert(pts.end(), w.goals.begin(), w.goals.end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_EQ(in_collision(lethal, pts[i]), 0);
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        EXPECT_GE(std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y), sc.goal_min_separation);
      }
      if (i > 0) EXPECT_LE(std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y), sc.goal_max_leg);
    }
  }
}

TEST(Generate, MazeGoalsMutuallyReachable) {
  Scenario sc;
  sc.kind = ScenarioKind::kMaze;
  sc.seed = 3;
  const GeneratedWorld w = generate(sc);
  const InflatedGrid g = inflate(w.grid, sc.collision_radius);
  std::vector<Cell> cells{g.frame().world_to_cell(w.start.x, w.start.y)};
  for (const Pose2& p : w.goals) cells.push_back(g.frame().world_to_cell(p.x, p.y));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      EXPECT_TRUE(oracle::bfs_reachable(g, cells[i], cells[j])) << i << " -> " << j;
    }
  }
  EXPECT_GT(w.grid.occupied_count(), 0u);
}

TEST(Generate, ImpossibleLayoutReportsAfterRounds) {
  Scenario sc;
  sc.width_m = 4.0;
  sc.height_m = 4.0;
  sc.goal_count = 10;
  sc.max_rounds = 3;
  EXPECT_THROW(generate(sc), GenerationError);
}

TEST(Generate, RejectsInconsistentParameters) {
  Scenario sc;
  sc.goal_count = 0;
  EXPECT_THROW(generate(sc), std::invalid_argument);
  sc = Scenario{};
  sc.wall_density = 1.5;
  EXPECT_THROW(generate(sc), std::invalid_argument);
  sc = Scenario{};
  sc.cylinder_radius_max = 0.1;
  EXPECT_THROW(generate(sc), std::invalid_argument);
}

TEST(Inflate, ZeroRadiusKeepsOccupiedSet) {
  const OccupancyGrid g = random_grid(4, 20, 15, 0.2);
  const InflatedGrid i = inflate(g, 0.0);
  EXPECT_EQ(i.cells(), g.cells());
}

TEST(Inflate, SingleCellDiscMatchesBruteForce) {
  OccupancyGrid g(9, 9, kRes);
  g.set_occupied({4, 4});
  const InflatedGrid i = inflate(g, 2 * kRes);
  EXPECT_EQ(i.cells(), oracle::brute_inflate(g, 2 * kRes));
  // 13 cells lie within two cells of the center.
  EXPECT_EQ(i.lethal_count(), 13u);
}

TEST(Inflate, RandomGridsMatchBruteForce) {
  for (int s = 0; s < 20; ++s) {
    const OccupancyGrid g = random_grid(100 + s, 17, 13, 0.05);
    for (double r : {0.05, 0.1, 0.15, 0.25, 0.37}) {
      EXPECT_EQ(inflate(g, r).cells(), oracle::brute_inflate(g, r)) << "seed " << s << " r " << r;
    }
  }
}

TEST(Inflate, MonotoneInRadius) {
  const OccupancyGrid g = random_grid(5, 40, 30, 0.02);
  std::vector<std::uint8_t> prev = g.cells();
  for (double r = 0.0; r <= 1.0; r += 0.07) {
    const InflatedGrid i = inflate(g, r);
    for (std::size_t k = 0; k < prev.size(); ++k) {
      if (prev[k]) EXPECT_TRUE(i.cells()[k]);
    }
    prev = i.cells();
  }
}

TEST(Inflate, HugeRadiusMakesEverythingLethal) {
  OccupancyGrid g(12, 7, kRes);
  g.set_occupied({0, 0});
  const InflatedGrid i = inflate(g, 10.0);
  EXPECT_EQ(i.lethal_count(), g.cells().size());
  EXPECT_EQ(inflate(OccupancyGrid(12, 7, kRes), 10.0).lethal_count(), 0u);
  EXPECT_THROW(inflate(g, -0.1), std::invalid_argument);
}

TEST(InCollision, Cases) {
  const GridFrame fr(20, 20, kRes);
  const InflatedGrid empty = InflatedGrid::empty(fr);
  EXPECT_EQ(in_collision(empty, {1.0, 1.0, 0.3}), 0);
  EXPECT_EQ(in_collision(empty, {0.0, 0.0, 0.0}), 0);
  EXPECT_EQ(in_collision(empty, {-0.01, 1.0, 0.0}), 1);
  EXPECT_EQ(in_collision(empty, {1.0, 2.0, 0.0}), 1);
  EXPECT_EQ(in_collision(empty, {1e30, -1e30, 0.0}), 1);

  OccupancyGrid g(20, 20, kRes);
  g.set_occupied({5, 5});
  const InflatedGrid i = inflate(g, 0.0);
  EXPECT_EQ(in_collision(i, {0.55, 0.55, 0.0}), 1);
  EXPECT_EQ(in_collision(i, {0.65, 0.55, 0.0}), 0);
}

TEST(GridFrame, RotatedOriginRoundTrip) {
  const GridFrame fr(10, 10, 0.5, {1.0, 2.0, 0.5});
  for (int x = 0; x < 10; ++x) {
    for (int y = 0; y < 10; ++y) {
      const auto [wx, wy] = fr.cell_center({x, y});
      EXPECT_EQ(fr.world_to_cell(wx, wy), (Cell{x, y}));
    }
  }
}

TEST(MapFile, RoundTripIsExact) {
  OccupancyGrid g(23, 11, 0.1, {-1.25, 3.0000000000000004, 0.1});
  std::mt19937_64 rng(1);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 23; ++x) g.set_occupied({x, y}, rng() % 3 == 0);
  }
  const std::string text = map_to_string(g);
  const OccupancyGrid back = map_from_string(text);
  EXPECT_EQ(back, g);
  EXPECT_EQ(map_to_string(back), text);
}

TEST(MapFile, TopRowIsLargestY) {
  OccupancyGrid g(3, 2, 1.0);
  g.set_occupied({0, 1});
  EXPECT_EQ(map_to_string(g), "3\n2\n1\n0\n0\n0\n#..\n...\n");
}

TEST(MapFile, MalformedInputRejected) {
  EXPECT_THROW(map_from_string("3\n2\n1\n0\n0\n0\n#..\n"), MapFormatError);
  EXPECT_THROW(map_from_string("3\n2\n1\n0\n0\n0\n#..\n..\n"), MapFormatError);
  EXPECT_THROW(map_from_string("3\n2\n1\n0\n0\n0\n#x.\n...\n"), MapFormatError);
  EXPECT_THROW(map_from_string("3.5\n2\n1\n0\n0\n0\n"), MapFormatError);
  EXPECT_THROW(map_from_string("abc\n"), MapFormatError);
}

TEST(GeodesicDistances, MatchesRelaxationOracle) {
  for (int s = 0; s < 10; ++s) {
    const OccupancyGrid g = random_grid(300 + s, 24, 24, 0.25);
    const InflatedGrid i = inflate(g, 0.0);
    Cell src{0, 0};
    while (!i.free(src)) src.ix++;
    const auto got = geodesic_distances(i, src);
    const auto want = oracle::relaxation_distances(i, src);
    for (std::size_t k = 0; k < got.size(); ++k) {
      if (std::isinf(want[k])) {
        EXPECT_TRUE(std::isinf(got[k]));
      } else {
        EXPECT_NEAR(got[k], want[k] * kRes, 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace swerve
