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
/// Finite-difference Jacobians of the sampling-space to command-space maps.
/// Rows follow the command layout [delta_fl, delta_fr, delta_rl, delta_rr,
/// V_fl, V_fr, V_rl, V_rr].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "swerve_mppi/kinematics.hpp"

namespace swerve {

enum class SpaceKind { k3DoF, k4DoF };

inline const char* to_string(SpaceKind s) { return s == SpaceKind::k3DoF ? "3DoF" : "4DoF"; }

class NonDifferentiableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dense 8 x cols matrix, row-major.
struct CommandJacobian {
  std::size_t cols = 0;
  std::vector<double> entries;

  double at(std::size_t row, std::size_t col) const { return entries[row * cols + col]; }
  double& at(std::size_t row, std::size_t col) { return entries[row * cols + col]; }

  double max_abs() const {
    double m = 0.0;
    for (double e : entries) m = std::max(m, std::abs(e));
    return m;
  }

  /// Copy scaled so the largest magnitude is 1.
  CommandJacobian normalized() const {
    CommandJacobian out = *this;
    const double m = max_abs();
    if (m > 0.0) {
      for (double& e : out.entries) e /= m;
    }
    return out;
  }

  std::size_t count_below(double threshold) const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [&](double e) { return std::abs(e) < threshold; }));
  }
};

struct JacobianResult {
  CommandJacobian raw;
  CommandJacobian normalized;
};

namespace detail {

inline std::array<double, 8> flatten(const VehicleCommand8& c) {
  return {c.delta[0], c.delta[1], c.delta[2], c.delta[3],
          c.speed[0], c.speed[1], c.speed[2], c.speed[3]};
}

inline VehicleCommand8 command_from_point(SpaceKind space, const std::vector<double>& p,
                                          const VehicleGeometry& g, const VehicleCommand8& prev) {
  if (space == SpaceKind::k3DoF) return command_from_control3({p[0], p[1], p[2]}, g, prev);
  return compose_4_to_command({p[0], p[1], p[2], p[3]}, g, prev);
}

}  // namespace detail

inline constexpr double kMinDifferentiableSpeed = 1e-6;

/// Central finite-difference Jacobian of the projection from `space` to the
/// command space at `point` (length 3 or 4, in the space's own layout).
inline JacobianResult jacobian_of_projection(SpaceKind space, const std::vector<double>& point,
                                             const VehicleGeometry& geom, double step = 1e-6) {
  const std::size_t n = space == SpaceKind::k3DoF ? 3 : 4;
  if (point.size() != n) {
    throw std::invalid_argument("jacobian_of_projection: operating point has wrong dimension");
  }
  const VehicleCommand8 center = detail::command_from_point(space, point, geom, {});
  for (double v : center.speed) {
    if (std::abs(v) < kMinDifferentiableSpeed) {
      throw NonDifferentiableError("jacobian_of_projection: a wheel speed vanishes at the operating point");
    }
  }
  JacobianResult r;
  r.raw.cols = n;
  r.raw.entries.assign(8 * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> plus = point;
    std::vector<double> minus = point;
    plus[j] += step;
    minus[j] -= step;
    const auto fp = detail::flatten(detail::command_from_point(space, plus, geom, center));
    const auto fm = detail::flatten(detail::command_from_point(space, minus, geom, center));
    for (std::size_t i = 0; i < 8; ++i) r.raw.at(i, j) = (fp[i] - fm[i]) / (2.0 * step);
  }
  r.normalized = r.raw.normalized();
  return r;
}

/// Operating points in both spaces for a uniform command where every wheel
/// has steering `delta` and speed `speed` (a pure translation).
inline std::vector<double> uniform_point_3dof(double delta, double speed) {
  return {speed * std::cos(delta), speed * std::sin(delta), 0.0};
}

inline std::vector<double> uniform_point_4dof(double delta, double speed) {
  return {speed, speed, delta, delta};
}

}  // namespace swerve
