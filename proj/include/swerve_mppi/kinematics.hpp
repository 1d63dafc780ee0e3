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
/// Control spaces of a four-wheel independent drive and steering vehicle and
/// the maps between them:
///
///   Control3  (v_x, v_y, omega)            center twist
///   Control4  (V_fl, V_rr, delta_fl, delta_rr)  diagonal wheel pair
///   WheelVelocities8                      planar velocity of every wheel
///   VehicleCommand8  (delta_*, V_*)        actuator command
///
/// Wheel order everywhere is fl, fr, rl, rr.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swerve {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

struct VehicleGeometry {
  double l_f = 0.5;
  double l_r = 0.5;
  double d_l = 0.5;
  double d_r = 0.5;

  void validate() const {
    for (double v : {l_f, l_r, d_l, d_r}) {
      if (!std::isfinite(v) || v <= 0.0) {
        throw std::invalid_argument("VehicleGeometry: wheel offsets must be positive and finite");
      }
    }
  }

  /// Radius of the smallest disc centered on the vehicle covering all wheels.
  double circumscribed_radius() const {
    return std::max({std::hypot(l_f, d_l), std::hypot(l_f, d_r), std::hypot(l_r, d_l),
                     std::hypot(l_r, d_r)});
  }
};

struct Control3 {
  double v_x = 0.0;
  double v_y = 0.0;
  double omega = 0.0;

  bool operator==(const Control3&) const = default;
};

struct Control4 {
  double v_fl = 0.0;
  double v_rr = 0.0;
  double delta_fl = 0.0;
  double delta_rr = 0.0;

  bool operator==(const Control4&) const = default;
};

/// Output of expand_4: [v_xfl, v_xrr, v_yfl, v_yrr].
struct DiagonalWheelVelocities {
  double vx_fl = 0.0;
  double vx_rr = 0.0;
  double vy_fl = 0.0;
  double vy_rr = 0.0;
};

enum Wheel : int { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };

struct WheelVelocities8 {
  std::array<double, 4> vx{};
  std::array<double, 4> vy{};
};

struct VehicleCommand8 {
  std::array<double, 4> delta{};
  std::array<double, 4> speed{};

  bool operator==(const VehicleCommand8&) const = default;

  /// Euclidean distance in the 8-dimensional command space.
  double distance_to(const VehicleCommand8& o) const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double dd = delta[i] - o.delta[i];
      const double dv = speed[i] - o.speed[i];
      s += dd * dd + dv * dv;
    }
    return std::sqrt(s);
  }
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  bool operator==(const Pose2&) const = default;
};

/// Actuator and twist limits.
struct ControlLimits {
  double v_max = 2.0;
  double omega_max = 1.58;
  double steer_max = 1.58;
};

inline Control3 clamp(const Control3& u, const ControlLimits& lim) {
  return {std::clamp(u.v_x, -lim.v_max, lim.v_max), std::clamp(u.v_y, -lim.v_max, lim.v_max),
          std::clamp(u.omega, -lim.omega_max, lim.omega_max)};
}

inline Control4 clamp(const Control4& u, const ControlLimits& lim) {
  return {std::clamp(u.v_fl, -lim.v_max, lim.v_max), std::clamp(u.v_rr, -lim.v_max, lim.v_max),
          std::clamp(u.delta_fl, -lim.steer_max, lim.steer_max),
          std::clamp(u.delta_rr, -lim.steer_max, lim.steer_max)};
}

/// u_full = C_{3->8} u_3DoF. Each wheel moves with the rigid-body velocity of
/// its contact point: v_x - omega * y_wheel, v_y + omega * x_wheel.
inline WheelVelocities8 expand_3_to_8(const Control3& u, const VehicleGeometry& g) {
  WheelVelocities8 w;
  w.vx[kFrontLeft] = u.v_x - g.d_l * u.omega;
  w.vx[kFrontRight] = u.v_x + g.d_r * u.omega;
  w.vx[kRearLeft] = u.v_x - g.d_l * u.omega;
  w.vx[kRearRight] = u.v_x + g.d_r * u.omega;
  w.vy[kFrontLeft] = u.v_y + g.l_f * u.omega;
  w.vy[kFrontRight] = u.v_y + g.l_f * u.omega;
  w.vy[kRearLeft] = u.v_y - g.l_r * u.omega;
  w.vy[kRearRight] = u.v_y - g.l_r * u.omega;
  return w;
}

struct WheelCommand {
  double delta = 0.0;
  double speed = 0.0;
};

/// Steering angle and signed speed for one wheel. The angle is folded into
/// (-pi/2, pi/2] and the fold is carried by the sign of the speed. A zero
/// velocity keeps `prev_delta`.
inline WheelCommand project_wheel(double vx, double vy, double prev_delta) {
  if (vx == 0.0 && vy == 0.0) return {prev_delta, 0.0};
  double delta = std::atan2(vy, vx);
  double speed = std::sqrt(vx * vx + vy * vy);
  if (delta > kPi / 2) {
    delta -= kPi;
    speed = -speed;
  } else if (delta <= -kPi / 2) {
    delta += kPi;
    speed = -speed;
  }
  return {delta, speed};
}

/// f_v: per-wheel planar velocity to (steering, signed speed).
inline VehicleCommand8 project_to_command(const WheelVelocities8& u8, const VehicleCommand8& prev) {
  VehicleCommand8 cmd;
  for (int i = 0; i < 4; ++i) {
    const WheelCommand wc = project_wheel(u8.vx[i], u8.vy[i], prev.delta[i]);
    cmd.delta[i] = wc.delta;
    cmd.speed[i] = wc.speed;
  }
  return cmd;
}

inline DiagonalWheelVelocities expand_4(const Control4& u) {
  return {u.v_fl * std::cos(u.delta_fl), u.v_rr * std::cos(u.delta_rr),
          u.v_fl * std::sin(u.delta_fl), u.v_rr * std::sin(u.delta_rr)};
}

/// C_{4->3}. The yaw rate averages the estimate from the longitudinal
/// difference across the track and the one from the lateral difference
/// across the wheelbase, so a kinematically consistent pair yields omega
/// exactly.
inline Control3 reduce_4_to_3(const DiagonalWheelVelocities& w, const VehicleGeometry& g) {
  const double track = g.d_l + g.d_r;
  const double base = g.l_f + g.l_r;
  return {(g.d_r * w.vx_fl + g.d_l * w.vx_rr) / track,
          (g.l_r * w.vy_fl + g.l_f * w.vy_rr) / base,
          0.5 * ((w.vx_rr - w.vx_fl) / track + (w.vy_fl - w.vy_rr) / base)};
}

/// The third row as it is usually printed for this reduction,
/// omega = (v_xrr - v_xfl) / (2 (d_l + d_r)). It recovers omega / 2 on
/// consistent inputs; kept only so tests can document the discrepancy.
inline Control3 reduce_4_to_3_printed(const DiagonalWheelVelocities& w, const VehicleGeometry& g) {
  const double track = g.d_l + g.d_r;
  Control3 u = reduce_4_to_3(w, g);
  u.omega = (w.vx_rr - w.vx_fl) / (2.0 * track);
  return u;
}

/// The (V_fl, V_rr, delta_fl, delta_rr) slice of a full command.
inline Control4 extract_fl_rr(const VehicleCommand8& cmd) {
  return {cmd.speed[kFrontLeft], cmd.speed[kRearRight], cmd.delta[kFrontLeft],
          cmd.delta[kRearRight]};
}

inline VehicleCommand8 command_from_control3(const Control3& u, const VehicleGeometry& g,
                                             const VehicleCommand8& prev) {
  return project_to_command(expand_3_to_8(u, g), prev);
}

inline Control3 control3_from_control4(const Control4& u, const VehicleGeometry& g) {
  return reduce_4_to_3(expand_4(u), g);
}

/// C_{4->8} followed by f_v: the command is always kinematically consistent.
inline VehicleCommand8 compose_4_to_command(const Control4& u, const VehicleGeometry& g,
                                            const VehicleCommand8& prev) {
  return command_from_control3(control3_from_control4(u, g), g, prev);
}

/// Center twist implied by a command, recovered from the diagonal wheel pair.
/// Exact for commands that satisfy the rigid-body constraint.
inline Control3 command_to_control3(const VehicleCommand8& cmd, const VehicleGeometry& g) {
  return control3_from_control4(extract_fl_rr(cmd), g);
}

/// Integrates a body-frame twist held constant for `dt` (circular arc).
inline Pose2 propagate(const Pose2& s, const Control3& u, double dt) {
  const double dtheta = u.omega * dt;
  const double c0 = std::cos(s.theta);
  const double s0 = std::sin(s.theta);
  if (std::abs(dtheta) < 1e-9) {
    return {s.x + (u.v_x * c0 - u.v_y * s0) * dt, s.y + (u.v_x * s0 + u.v_y * c0) * dt,
            wrap_angle(s.theta + dtheta)};
  }
  const double theta1 = s.theta + dtheta;
  const double c1 = std::cos(theta1);
  const double s1 = std::sin(theta1);
  const double ds = (s1 - s0) / u.omega;
  const double dc = (c0 - c1) / u.omega;
  return {s.x + u.v_x * ds - u.v_y * dc, s.y + u.v_x * dc + u.v_y * ds, wrap_angle(theta1)};
}

}  // namespace swerve
