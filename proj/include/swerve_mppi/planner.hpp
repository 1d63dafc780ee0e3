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
/// Dijkstra global planner on an inflated grid and the reference path the
/// MPPI costs track.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swerve_mppi/kinematics.hpp"
#include "swerve_mppi/world.hpp"

namespace swerve {

class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathErrors {
  double dist_err = 0.0;
  double angle_err = 0.0;
  double progress = 0.0;
};

/// Poses with cumulative arc length, plus a bucket index for nearest-waypoint
/// lookups from inside rollouts.
class ReferencePath {
 public:
  ReferencePath() = default;

  explicit ReferencePath(std::vector<Pose2> waypoints) : poses_(std::move(waypoints)) {
    if (poses_.empty()) throw std::invalid_argument("ReferencePath: needs at least one waypoint");
    arc_.resize(poses_.size(), 0.0);
    for (std::size_t i = 1; i < poses_.size(); ++i) {
      arc_[i] = arc_[i - 1] + std::hypot(poses_[i].x - poses_[i - 1].x, poses_[i].y - poses_[i - 1].y);
    }
    for (auto& p : poses_) p.theta = wrap_angle(p.theta);
    build_index();
  }

  const std::vector<Pose2>& poses() const { return poses_; }
  const std::vector<double>& arc_length() const { return arc_; }
  std::size_t size() const { return poses_.size(); }
  double length() const { return arc_.back(); }
  const Pose2& back() const { return poses_.back(); }

  /// Index of the nearest waypoint; ties go to the larger index.
  std::size_t nearest(double x, double y) const {
    const double fx = (x - min_x_) / bucket_;
    const double fy = (y - min_y_) / bucket_;
    if (!(fx >= 0.0 && fy >= 0.0 && fx < nx_ && fy < ny_)) return nearest_linear(x, y);
    const std::size_t b = static_cast<std::size_t>(std::min(static_cast<int>(fy), ny_ - 1)) * nx_ +
                          static_cast<std::size_t>(std::min(static_cast<int>(fx), nx_ - 1));
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::uint32_t k = bucket_start_[b]; k < bucket_start_[b + 1]; ++k) {
      const std::uint32_t i = bucket_items_[k];
      const double dx = poses_[i].x - x;
      const double dy = poses_[i].y - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2 || (d2 == best_d2 && i > best)) {
        best_d2 = d2;
        best = i;
      }
    }
    return best;
  }

  std::size_t nearest_linear(double x, double y) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 0; i < poses_.size(); ++i) {
      const double dx = poses_[i].x - x;
      const double dy = poses_[i].y - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    return best;
  }

 private:
  // Each bucket lists every waypoint that can be nearest to some point of
  // the bucket: those whose distance to the bucket rectangle does not exceed
  // the smallest farthest-corner distance over all waypoints.
  void build_index() {
    min_x_ = max_x_ = poses_[0].x;
    min_y_ = max_y_ = poses_[0].y;
    for (const auto& p : poses_) {
      min_x_ = std::min(min_x_, p.x);
      max_x_ = std::max(max_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_y_ = std::max(max_y_, p.y);
    }
    // Pad so that rollouts wandering off the path still hit the index.
    constexpr double kPad = 4.0;
    min_x_ -= kPad;
    min_y_ -= kPad;
    max_x_ += kPad;
    max_y_ += kPad;
    bucket_ = 0.25;
    nx_ = std::max(1, static_cast<int>(std::floor((max_x_ - min_x_) / bucket_)) + 1);
    ny_ = std::max(1, static_cast<int>(std::floor((max_y_ - min_y_) / bucket_)) + 1);

    bucket_start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    bucket_items_.clear();
    std::vector<double> lo(poses_.size());
    for (int by = 0; by < ny_; ++by) {
      const double y0 = min_y_ + by * bucket_;
      const double y1 = y0 + bucket_;
      for (int bx = 0; bx < nx_; ++bx) {
        const double x0 = min_x_ + bx * bucket_;
        const double x1 = x0 + bucket_;
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < poses_.size(); ++i) {
          const double px = poses_[i].x;
          const double py = poses_[i].y;
          const double ox = std::max({x0 - px, 0.0, px - x1});
          const double oy = std::max({y0 - py, 0.0, py - y1});
          lo[i] = ox * ox + oy * oy;
          const double fx = std::max(px - x0, x1 - px);
          const double fy = std::max(py - y0, y1 - py);
          bound = std::min(bound, fx * fx + fy * fy);
        }
        for (std::size_t i = 0; i < poses_.size(); ++i) {
          if (lo[i] <= bound) bucket_items_.push_back(static_cast<std::uint32_t>(i));
        }
        bucket_start_[static_cast<std::size_t>(by) * nx_ + bx + 1] =
            static_cast<std::uint32_t>(bucket_items_.size());
      }
    }
  }

  std::vector<Pose2> poses_;
  std::vector<double> arc_;
  double min_x_ = 0.0, max_x_ = 0.0, min_y_ = 0.0, max_y_ = 0.0;
  double bucket_ = 0.25;
  int nx_ = 1, ny_ = 1;
  std::vector<std::uint32_t> bucket_start_;
  std::vector<std::uint32_t> bucket_items_;
};

/// Raw tracking errors against the nearest waypoint.
inline PathErrors query_errors(const ReferencePath& path, const Pose2& p) {
  const std::size_t i = path.nearest(p.x, p.y);
  const Pose2& w = path.poses()[i];
  return {std::hypot(p.x - w.x, p.y - w.y), std::abs(wrap_angle(p.theta - w.theta)),
          path.arc_length()[i]};
}

/// Bearing from the waypoint `lookback` metres of arc before the end to the
/// last waypoint. Falls back to the last orientation on degenerate paths.
inline double arrival_heading(const ReferencePath& path, double lookback = 0.5) {
  const auto& P = path.poses();
  const auto& s = path.arc_length();
  if (P.size() < 2 || path.length() <= 0.0) return P.empty() ? 0.0 : P.back().theta;
  std::size_t i = P.size() - 1;
  while (i > 0 && s.back() - s[i] < lookback) --i;
  return std::atan2(P.back().y - P[i].y, P.back().x - P[i].x);
}

/// Bearing from the first waypoint to the one `lookahead` metres along.
inline double departure_heading(const ReferencePath& path, double lookahead = 0.5) {
  const auto& P = path.poses();
  const auto& s = path.arc_length();
  if (P.size() < 2 || path.length() <= 0.0) return P.empty() ? 0.0 : P.front().theta;
  std::size_t i = 0;
  while (i + 1 < P.size() && s[i] < lookahead) ++i;
  return std::atan2(P[i].y - P.front().y, P[i].x - P.front().x);
}

struct GridPath {
  std::vector<Cell> cells;
  double cost = 0.0;  ///< in cells (straight 1, diagonal sqrt 2)
};

/// Dijkstra over 8-connected free cells. A diagonal move squeezing between
/// two blocked orthogonal neighbours is not allowed. Throws NoPathError when
/// the goal is unreachable.
inline GridPath dijkstra(const InflatedGrid& grid, Cell start, Cell goal) {
  const GridFrame& fr = grid.frame();
  if (!grid.free(start)) throw NoPathError("plan: start cell is not free");
  if (!grid.free(goal)) throw NoPathError("plan: goal cell is not free");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(fr.size(), kInf);
  std::vector<std::int64_t> parent(fr.size(), -1);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t s = fr.index(start);
  const std::size_t g = fr.index(goal);
  dist[s] = 0.0;
  open.emplace(0.0, s);
  constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!open.empty()) {
    const auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    if (idx == g) break;
    const Cell c = fr.cell_of(idx);
    for (int k = 0; k < 8; ++k) {
      const Cell nb{c.ix + kDx[k], c.iy + kDy[k]};
      if (!grid.free(nb)) continue;
      const bool diagonal = k >= 4;
      if (diagonal && !grid.free({c.ix + kDx[k], c.iy}) && !grid.free({c.ix, c.iy + kDy[k]})) {
        continue;
      }
      const double nd = d + (diagonal ? std::numbers::sqrt2 : 1.0);
      const std::size_t ni = fr.index(nb);
      if (nd < dist[ni]) {
        dist[ni] = nd;
        parent[ni] = static_cast<std::int64_t>(idx);
        open.emplace(nd, ni);
      }
    }
  }
  if (dist[g] == kInf) throw NoPathError("plan: goal is unreachable from start");
  GridPath out;
  out.cost = dist[g];
  for (std::int64_t i = static_cast<std::int64_t>(g); i != -1; i = parent[static_cast<std::size_t>(i)]) {
    out.cells.push_back(fr.cell_of(static_cast<std::size_t>(i)));
  }
  std::reverse(out.cells.begin(), out.cells.end());
  return out;
}

struct PlannerOptions {
  double spacing = 0.1;  ///< resampled waypoint spacing [m]
};

/// Shortest grid path from start to goal, polyline through the exact start
/// point, the cell centers and the exact goal point, resampled at uniform
/// spacing. Intermediate headings follow the tangent; the last waypoint
/// carries the goal heading.
inline ReferencePath plan(const InflatedGrid& grid, const Pose2& start, const Pose2& goal,
                          const PlannerOptions& opt = {}) {
  const GridFrame& fr = grid.frame();
  const Cell sc = fr.world_to_cell(start.x, start.y);
  const Cell gc = fr.world_to_cell(goal.x, goal.y);
  const GridPath gp = dijkstra(grid, sc, gc);

  std::vector<std::pair<double, double>> poly;
  poly.emplace_back(start.x, start.y);
  for (std::size_t i = 1; i + 1 < gp.cells.size(); ++i) poly.push_back(fr.cell_center(gp.cells[i]));
  poly.emplace_back(goal.x, goal.y);
  if (gp.cells.size() == 1) poly.resize(1);  // start and goal share a cell

  std::vector<double> cum(poly.size(), 0.0);
  for (std::size_t i = 1; i < poly.size(); ++i) {
    cum[i] = cum[i - 1] + std::hypot(poly[i].first - poly[i - 1].first, poly[i].second - poly[i - 1].second);
  }
  const double total = cum.back();
  std::vector<Pose2> pts;
  if (total <= 0.0) {
    pts.push_back({goal.x, goal.y, goal.theta});
    return ReferencePath(std::move(pts));
  }
  const int n = std::max(1, static_cast<int>(std::ceil(total / opt.spacing - 1e-9)));
  std::size_t seg = 0;
  for (int k = 0; k <= n; ++k) {
    const double s = total * k / n;
    while (seg + 2 < poly.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    pts.push_back({poly[seg].first + t * (poly[seg + 1].first - poly[seg].first),
                   poly[seg].second + t * (poly[seg + 1].second - poly[seg].second), 0.0});
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = std::min(i + 1, pts.size() - 1);
    pts[i].theta = std::atan2(pts[b].y - pts[a].y, pts[b].x - pts[a].x);
  }
  pts.back().theta = goal.theta;
  return ReferencePath(std::move(pts));
}

/// CSV dump with columns x, y, theta, s.
inline void write_path_csv(std::ostream& os, const ReferencePath& path) {
  os << "x,y,theta,s\n";
  char buf[128];
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Pose2& p = path.poses()[i];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", p.x, p.y, p.theta, path.arc_length()[i]);
    os << buf;
  }
}

}  // namespace swerve
