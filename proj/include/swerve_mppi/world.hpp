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
/// Occupancy grids, footprint inflation, collision queries and the procedural
/// cylinder-garden / maze generators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <queue>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swerve_mppi/kinematics.hpp"

namespace swerve {

struct Cell {
  int ix = 0;
  int iy = 0;

  bool operator==(const Cell&) const = default;
};

/// Geometry shared by every grid layer: size, resolution and the pose of the
/// lower-left corner of cell (0, 0) in the world frame.
class GridFrame {
 public:
  GridFrame() = default;
  GridFrame(int width, int height, double resolution, Pose2 origin = {})
      : width_(width), height_(height), resolution_(resolution), origin_(origin) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("grid: width and height must be positive");
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
      throw std::invalid_argument("grid: resolution must be positive");
    }
    cos_ = std::cos(origin.theta);
    sin_ = std::sin(origin.theta);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Pose2& origin() const { return origin_; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }

  bool contains(Cell c) const { return c.ix >= 0 && c.iy >= 0 && c.ix < width_ && c.iy < height_; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.iy) * width_ + c.ix; }
  Cell cell_of(std::size_t idx) const {
    return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)};
  }

  /// Cell containing a world point; may lie outside the grid.
  Cell world_to_cell(double x, double y) const {
    const double dx = x - origin_.x;
    const double dy = y - origin_.y;
    const double gx = (cos_ * dx + sin_ * dy) / resolution_;
    const double gy = (-sin_ * dx + cos_ * dy) / resolution_;
    // Keep far-away points representable as int.
    constexpr double kLimit = 1e9;
    return {static_cast<int>(std::floor(std::clamp(gx, -kLimit, kLimit))),
            static_cast<int>(std::floor(std::clamp(gy, -kLimit, kLimit)))};
  }

  /// World coordinates of a cell center.
  std::pair<double, double> cell_center(Cell c) const {
    const double gx = (c.ix + 0.5) * resolution_;
    const double gy = (c.iy + 0.5) * resolution_;
    return {origin_.x + cos_ * gx - sin_ * gy, origin_.y + sin_ * gx + cos_ * gy};
  }

  bool operator==(const GridFrame& o) const {
    return width_ == o.width_ && height_ == o.height_ && resolution_ == o.resolution_ &&
           origin_ == o.origin_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  Pose2 origin_{};
  double cos_ = 1.0;
  double sin_ = 0.0;
};

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution, Pose2 origin = {})
      : frame_(width, height, resolution, origin), cells_(frame_.size(), 0) {}

  const GridFrame& frame() const { return frame_; }
  int width() const { return frame_.width(); }
  int height() const { return frame_.height(); }
  double resolution() const { return frame_.resolution(); }

  bool occupied(Cell c) const { return cells_[frame_.index(c)] != 0; }
  void set_occupied(Cell c, bool v = true) { cells_[frame_.index(c)] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  std::size_t occupied_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
  }

  bool operator==(const OccupancyGrid&) const = default;

 private:
  GridFrame frame_;
  std::vector<std::uint8_t> cells_;
};

/// Grid whose lethal cells are every cell within `radius` of an occupied cell.
class InflatedGrid {
 public:
  InflatedGrid() = default;
  InflatedGrid(GridFrame frame, std::vector<std::uint8_t> lethal, double radius)
      : frame_(std::move(frame)), lethal_(std::move(lethal)), radius_(radius) {}

  const GridFrame& frame() const { return frame_; }
  int width() const { return frame_.width(); }
  int height() const { return frame_.height(); }
  double radius() const { return radius_; }

  bool lethal(Cell c) const { return lethal_[frame_.index(c)] != 0; }
  bool free(Cell c) const { return frame_.contains(c) && !lethal(c); }
  const std::vector<std::uint8_t>& cells() const { return lethal_; }

  std::size_t lethal_count() const {
    return static_cast<std::size_t>(std::count(lethal_.begin(), lethal_.end(), std::uint8_t{1}));
  }

  /// Grid with nothing lethal, for obstacle-free tests.
  static InflatedGrid empty(const GridFrame& frame) {
    return {frame, std::vector<std::uint8_t>(frame.size(), 0), 0.0};
  }

 private:
  GridFrame frame_;
  std::vector<std::uint8_t> lethal_;
  double radius_ = 0.0;
};

namespace detail {

/// 1-D squared Euclidean distance transform (lower envelope of parabolas).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                   std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (f[v[0]] == kInf) {
      v[0] = q;
      continue;
    }
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (f[v[0]] == kInf) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace detail

/// Squared distance, in cells, from each cell center to the nearest occupied
/// cell center. Infinity everywhere when nothing is occupied.
inline std::vector<double> squared_distance_transform(const OccupancyGrid& grid) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int w = grid.width();
  const int h = grid.height();
  std::vector<double> dist(grid.frame().size());
  for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = grid.cells()[i] ? 0.0 : kInf;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  f.resize(h);
  d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
    detail::edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = dist[static_cast<std::size_t>(y) * w + x];
    detail::edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) dist[static_cast<std::size_t>(y) * w + x] = d[x];
  }
  return dist;
}

inline InflatedGrid inflate(const OccupancyGrid& grid, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("inflate: radius must be non-negative");
  const auto dist2 = squared_distance_transform(grid);
  const double r_cells = radius / grid.resolution();
  const double limit = r_cells * r_cells * (1.0 + 1e-12) + 1e-12;
  std::vector<std::uint8_t> lethal(dist2.size());
  for (std::size_t i = 0; i < dist2.size(); ++i) lethal[i] = dist2[i] <= limit ? 1 : 0;
  return {grid.frame(), std::move(lethal), radius};
}

/// 1 when the vehicle center sits on a lethal cell or outside the map.
inline int in_collision(const InflatedGrid& grid, const Pose2& p) {
  const Cell c = grid.frame().world_to_cell(p.x, p.y);
  if (!grid.frame().contains(c)) return 1;
  return grid.lethal(c) ? 1 : 0;
}

/// Label of the 4-connected free component of every cell (-1 for lethal).
inline std::vector<int> label_free_components(const InflatedGrid& grid) {
  const GridFrame& fr = grid.frame();
  std::vector<int> label(fr.size(), -1);
  int next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < fr.size(); ++seed) {
    if (label[seed] != -1 || grid.cells()[seed]) continue;
    label[seed] = next;
    queue.push_back(seed);
    while (!queue.empty()) {
      const Cell c = fr.cell_of(queue.front());
      queue.pop_front();
      constexpr int kDx[4] = {1, -1, 0, 0};
      constexpr int kDy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const Cell nb{c.ix + kDx[k], c.iy + kDy[k]};
        if (!grid.free(nb)) continue;
        const std::size_t ni = fr.index(nb);
        if (label[ni] != -1) continue;
        label[ni] = next;
        queue.push_back(ni);
      }
    }
    ++next;
  }
  return label;
}

/// Octile path length [m] from `source` to every free cell (infinity where
/// unreachable). A diagonal step is refused only when both orthogonal
/// neighbours are blocked, matching the global planner.
inline std::vector<double> geodesic_distances(const InflatedGrid& grid, Cell source) {
  const GridFrame& fr = grid.frame();
  std::vector<double> dist(fr.size(), std::numeric_limits<double>::infinity());
  if (!grid.free(source)) return dist;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[fr.index(source)] = 0.0;
  open.push({0.0, fr.index(source)});
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist[i]) continue;
    const Cell c = fr.cell_of(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell nb{c.ix + dx, c.iy + dy};
        if (!grid.free(nb)) continue;
        if (dx != 0 && dy != 0 && !grid.free({c.ix + dx, c.iy}) && !grid.free({c.ix, c.iy + dy})) continue;
        const double nd = d + ((dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0) * fr.resolution();
        const std::size_t ni = fr.index(nb);
        if (nd < dist[ni]) {
          dist[ni] = nd;
          open.push({nd, ni});
        }
      }
    }
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Map files

class MapFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw MapFormatError(std::string("map: cannot parse ") + what + ": '" + s + "'");
  }
  if (pos != s.size()) throw MapFormatError(std::string("map: trailing characters in ") + what);
  return v;
}

}  // namespace detail

/// Header lines (width, height, resolution, origin x, origin y, origin theta)
/// followed by `height` rows of '.'/'#'. The first row is the top (largest iy).
inline void save_map(std::ostream& os, const OccupancyGrid& grid) {
  const GridFrame& fr = grid.frame();
  os << fr.width() << '\n'
     << fr.height() << '\n'
     << detail::format_real(fr.resolution()) << '\n'
     << detail::format_real(fr.origin().x) << '\n'
     << detail::format_real(fr.origin().y) << '\n'
     << detail::format_real(fr.origin().theta) << '\n';
  std::string row(static_cast<std::size_t>(fr.width()), '.');
  for (int iy = fr.height() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < fr.width(); ++ix) row[ix] = grid.occupied({ix, iy}) ? '#' : '.';
    os << row << '\n';
  }
}

inline OccupancyGrid load_map(std::istream& is) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(is, line)) throw MapFormatError(std::string("map: missing ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  const double w = detail::parse_real(next_line("width"), "width");
  const double h = detail::parse_real(next_line("height"), "height");
  if (w != std::floor(w) || h != std::floor(h) || w <= 0 || h <= 0 || w > 1e6 || h > 1e6) {
    throw MapFormatError("map: width and height must be positive integers");
  }
  const double res = detail::parse_real(next_line("resolution"), "resolution");
  Pose2 origin;
  origin.x = detail::parse_real(next_line("origin x"), "origin x");
  origin.y = detail::parse_real(next_line("origin y"), "origin y");
  origin.theta = detail::parse_real(next_line("origin theta"), "origin theta");
  OccupancyGrid grid(static_cast<int>(w), static_cast<int>(h), res, origin);
  for (int iy = grid.height() - 1; iy >= 0; --iy) {
    next_line("grid row");
    if (line.size() != static_cast<std::size_t>(grid.width())) {
      throw MapFormatError("map: row " + std::to_string(grid.height() - 1 - iy) + " has wrong length");
    }
    for (int ix = 0; ix < grid.width(); ++ix) {
      const char ch = line[static_cast<std::size_t>(ix)];
      if (ch != '.' && ch != '#') throw MapFormatError("map: unexpected character in grid");
      grid.set_occupied({ix, iy}, ch == '#');
    }
  }
  return grid;
}

inline std::string map_to_string(const OccupancyGrid& grid) {
  std::ostringstream os;
  save_map(os, grid);
  return os.str();
}

inline OccupancyGrid map_from_string(const std::string& text) {
  std::istringstream is(text);
  return load_map(is);
}

// ---------------------------------------------------------------------------
// Scenario generation

enum class ScenarioKind { kCylinderGarden, kMaze };

inline const char* to_string(ScenarioKind k) {
  return k == ScenarioKind::kCylinderGarden ? "cylinder_garden" : "maze";
}

struct Scenario {
  ScenarioKind kind = ScenarioKind::kCylinderGarden;
  double width_m = 20.0;
  double height_m = 20.0;
  double resolution = 0.1;
  bool border = true;

  int cylinder_count = 28;
  double cylinder_radius_min = 0.25;
  double cylinder_radius_max = 0.5;

  double maze_cell = 4.0;          ///< corridor pitch [m]
  double maze_wall_thickness = 0.2;
  double wall_density = 0.5;       ///< fraction of loop-closing walls kept

  int goal_count = 10;
  double goal_min_separation = 3.0;
  double goal_max_leg = 6.0;       ///< straight-line bound from the previous point [m], 0 = none
  double goal_max_detour = 1.3;    ///< grid path length over straight distance, 0 = none
  double goal_clearance = 0.3;     ///< extra free margin around start and goals [m]
  double collision_radius = 0.7571;  ///< inflation used to verify connectivity [m]

  std::uint64_t seed = 0;
  int max_rounds = 64;
};

struct GeneratedWorld {
  OccupancyGrid grid;
  Pose2 start;
  std::vector<Pose2> goals;
  int rounds = 1;  ///< layouts tried, including the accepted one
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits, independent of the
/// standard library's distribution implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline void fill_disc(OccupancyGrid& grid, double cx, double cy, double r) {
  const GridFrame& fr = grid.frame();
  const Cell lo = fr.world_to_cell(cx - r, cy - r);
  const Cell hi = fr.world_to_cell(cx + r, cy + r);
  for (int iy = std::max(0, lo.iy); iy <= std::min(fr.height() - 1, hi.iy); ++iy) {
    for (int ix = std::max(0, lo.ix); ix <= std::min(fr.width() - 1, hi.ix); ++ix) {
      const auto [x, y] = fr.cell_center({ix, iy});
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) grid.set_occupied({ix, iy});
    }
  }
}

/// Marks every cell whose center lies in [x0, x1] x [y0, y1].
inline void fill_rect(OccupancyGrid& grid, double x0, double y0, double x1, double y1) {
  const GridFrame& fr = grid.frame();
  for (int iy = 0; iy < fr.height(); ++iy) {
    for (int ix = 0; ix < fr.width(); ++ix) {
      const auto [x, y] = fr.cell_center({ix, iy});
      if (x >= x0 && x <= x1 && y >= y0 && y <= y1) grid.set_occupied({ix, iy});
    }
  }
}

inline void draw_border(OccupancyGrid& grid) {
  for (int ix = 0; ix < grid.width(); ++ix) {
    grid.set_occupied({ix, 0});
    grid.set_occupied({ix, grid.height() - 1});
  }
  for (int iy = 0; iy < grid.height(); ++iy) {
    grid.set_occupied({0, iy});
    grid.set_occupied({grid.width() - 1, iy});
  }
}

inline void place_cylinders(OccupancyGrid& grid, const Scenario& sc, std::mt19937_64& rng) {
  for (int i = 0; i < sc.cylinder_count; ++i) {
    const double cx = uniform(rng, 0.0, sc.width_m);
    const double cy = uniform(rng, 0.0, sc.height_m);
    const double r = uniform(rng, sc.cylinder_radius_min, sc.cylinder_radius_max);
    fill_disc(grid, cx, cy, r);
  }
}

/// Depth-first spanning maze over a lattice of corridor cells; walls that
/// would close loops survive with probability `wall_density`.
inline void place_maze(OccupancyGrid& grid, const Scenario& sc, std::mt19937_64& rng) {
  const int nx = std::max(1, static_cast<int>(std::floor(sc.width_m / sc.maze_cell)));
  const int ny = std::max(1, static_cast<int>(std::floor(sc.height_m / sc.maze_cell)));
  const double pitch_x = sc.width_m / nx;
  const double pitch_y = sc.height_m / ny;
  const double half = 0.5 * sc.maze_wall_thickness;

  // open_east[i][j]: passage between (i, j) and (i + 1, j); open_north likewise.
  std::vector<std::uint8_t> open_east(static_cast<std::size_t>(nx * ny), 0);
  std::vector<std::uint8_t> open_north(static_cast<std::size_t>(nx * ny), 0);
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(nx * ny), 0);
  auto id = [nx](int i, int j) { return static_cast<std::size_t>(j * nx + i); };

  std::vector<std::pair<int, int>> stack{{0, 0}};
  visited[id(0, 0)] = 1;
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    std::pair<int, int> options[4];
    int n = 0;
    if (i + 1 < nx && !visited[id(i + 1, j)]) options[n++] = {i + 1, j};
    if (i > 0 && !visited[id(i - 1, j)]) options[n++] = {i - 1, j};
    if (j + 1 < ny && !visited[id(i, j + 1)]) options[n++] = {i, j + 1};
    if (j > 0 && !visited[id(i, j - 1)]) options[n++] = {i, j - 1};
    if (n == 0) {
      stack.pop_back();
      continue;
    }
    const auto [a, b] = options[rng() % static_cast<std::uint64_t>(n)];
    if (a != i) open_east[id(std::min(a, i), j)] = 1;
    if (b != j) open_north[id(i, std::min(b, j))] = 1;
    visited[id(a, b)] = 1;
    stack.emplace_back(a, b);
  }

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x1 = (i + 1) * pitch_x;
      const double y1 = (j + 1) * pitch_y;
      if (i + 1 < nx) {
        const bool keep = !open_east[id(i, j)] && uniform01(rng) < sc.wall_density;
        if (keep) fill_rect(grid, x1 - half, j * pitch_y - half, x1 + half, y1 + half);
      }
      if (j + 1 < ny) {
        const bool keep = !open_north[id(i, j)] && uniform01(rng) < sc.wall_density;
        if (keep) fill_rect(grid, i * pitch_x - half, y1 - half, x1 + half, y1 + half);
      }
      if (i + 1 < nx && j + 1 < ny) fill_rect(grid, x1 - half, y1 - half, x1 + half, y1 + half);
    }
  }
}

}  // namespace detail

inline void validate(const Scenario& sc) {
  if (!(sc.width_m > 0.0) || !(sc.height_m > 0.0) || !(sc.resolution > 0.0)) {
    throw std::invalid_argument("scenario: field size and resolution must be positive");
  }
  if (sc.goal_count < 1) throw std::invalid_argument("scenario: goal_count must be >= 1");
  if (sc.cylinder_count < 0 || sc.cylinder_radius_min < 0.0 ||
      sc.cylinder_radius_max < sc.cylinder_radius_min) {
    throw std::invalid_argument("scenario: invalid cylinder parameters");
  }
  if (sc.kind == ScenarioKind::kMaze &&
      (!(sc.maze_cell > 2.0 * sc.maze_wall_thickness) || sc.maze_wall_thickness < 0.0)) {
    throw std::invalid_argument("scenario: maze cells must be wider than two walls");
  }
  if (sc.wall_density < 0.0 || sc.wall_density > 1.0) {
    throw std::invalid_argument("scenario: wall_density must lie in [0, 1]");
  }
  if (sc.goal_min_separation < 0.0 || sc.goal_max_leg < 0.0 || sc.goal_max_detour < 0.0 ||
      (sc.goal_max_leg > 0.0 && sc.goal_max_leg < sc.goal_min_separation) ||
      (sc.goal_max_detour > 0.0 && sc.goal_max_detour < 1.0)) {
    throw std::invalid_argument("scenario: goal spacing bounds are inconsistent");
  }
  if (sc.max_rounds < 1) throw std::invalid_argument("scenario: max_rounds must be >= 1");
}

/// Deterministic world for `sc.seed`: obstacles, a start pose and
/// `goal_count` goals that are pairwise separated and mutually reachable
/// through free space of the footprint-inflated grid, each a bounded leg
/// from its predecessor. Goal headings point from the previous waypoint
/// toward the goal.
inline GeneratedWorld generate(const Scenario& sc) {
  validate(sc);
  const int w = std::max(1, static_cast<int>(std::lround(sc.width_m / sc.resolution)));
  const int h = std::max(1, static_cast<int>(std::lround(sc.height_m / sc.resolution)));

  for (int round = 0; round < sc.max_rounds; ++round) {
    std::mt19937_64 rng(sc.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(round));
    OccupancyGrid grid(w, h, sc.resolution);
    if (sc.kind == ScenarioKind::kCylinderGarden) {
      detail::place_cylinders(grid, sc, rng);
    } else {
      detail::place_maze(grid, sc, rng);
    }
    if (sc.border) detail::draw_border(grid);

    const InflatedGrid reach = inflate(grid, sc.collision_radius);
    const InflatedGrid roomy = inflate(grid, sc.collision_radius + sc.goal_clearance);
    const auto labels = label_free_components(reach);

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < roomy.cells().size(); ++i) {
      if (!roomy.cells()[i]) candidates.push_back(i);
    }
    if (candidates.empty()) continue;

    // Start plus goals, all pairwise separated and in one component. Each
    // goal also lies within goal_max_leg of its predecessor and is reachable
    // without a long detour.
    std::vector<std::pair<double, double>> points;
    std::vector<double> from_prev;
    int component = -1;
    constexpr int kDrawsPerPoint = 400;
    for (int p = 0; p <= sc.goal_count; ++p) {
      bool placed = false;
      for (int draw = 0; draw < kDrawsPerPoint && !placed; ++draw) {
        const std::size_t idx = candidates[rng() % candidates.size()];
        if (component >= 0 && labels[idx] != component) continue;
        const auto [x, y] = grid.frame().cell_center(grid.frame().cell_of(idx));
        bool far_enough = true;
        for (const auto& [px, py] : points) {
          if (std::hypot(x - px, y - py) < sc.goal_min_separation) {
            far_enough = false;
            break;
          }
        }
        if (!far_enough) continue;
        if (!points.empty()) {
          const double straight = std::hypot(x - points.back().first, y - points.back().second);
          if (sc.goal_max_leg > 0.0 && straight > sc.goal_max_leg) continue;
          if (sc.goal_max_detour > 0.0 && !(from_prev[idx] <= sc.goal_max_detour * straight)) continue;
        }
        if (component < 0) component = labels[idx];
        points.emplace_back(x, y);
        if (sc.goal_max_detour > 0.0) from_prev = geodesic_distances(reach, grid.frame().cell_of(idx));
        placed = true;
      }
      if (!placed) break;
    }
    if (static_cast<int>(points.size()) != sc.goal_count + 1) continue;

    GeneratedWorld out;
    out.grid = std::move(grid);
    out.rounds = round + 1;
    const double first_heading =
        std::atan2(points[1].second - points[0].second, points[1].first - points[0].first);
    out.start = {points[0].first, points[0].second, wrap_angle(first_heading)};
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double heading = std::atan2(points[i].second - points[i - 1].second,
                                        points[i].first - points[i - 1].first);
      out.goals.push_back({points[i].first, points[i].second, wrap_angle(heading)});
    }
    return out;
  }
  throw GenerationError("generate: no valid " + std::string(to_string(sc.kind)) + " layout after " +
                        std::to_string(sc.max_rounds) +
                        " rounds; obstacles too dense or goal separation too large");
}

}  // namespace swerve
