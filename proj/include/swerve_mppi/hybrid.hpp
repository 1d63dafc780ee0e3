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
/// Switching between the 3DoF and 4DoF sampling spaces. The space is chosen
/// from the path tracking error every tick; after solving in one space the
/// result is converted so the other space's warm start stays current.

#include <optional>
#include <variant>

#include "swerve_mppi/kinematics.hpp"
#include "swerve_mppi/mppi.hpp"
#include "swerve_mppi/planner.hpp"

namespace swerve {

enum class Variant3 { kA, kB };

struct HybridConfig {
  double d_thresh = 0.3;      ///< [m]
  double theta_thresh = 0.3;  ///< [rad]
  Variant3 space_a = Variant3::kA;
  /// Extra margin required to leave the 4DoF space again. 0 = memoryless.
  double hysteresis = 0.0;

  void validate() const {
    if (!(d_thresh >= 0.0) || !(theta_thresh >= 0.0)) {
      throw ConfigError("hybrid: thresholds must be non-negative");
    }
    if (!(hysteresis >= 0.0)) throw ConfigError("hybrid: hysteresis must be non-negative");
  }
};

/// 3DoF iff both raw tracking errors are strictly below their thresholds.
inline SpaceKind select_mode(double dist_err, double angle_err, const HybridConfig& cfg,
                             std::optional<SpaceKind> previous = std::nullopt) {
  double d = cfg.d_thresh;
  double a = cfg.theta_thresh;
  if (previous == SpaceKind::k4DoF) {
    d -= cfg.hysteresis;
    a -= cfg.hysteresis;
  }
  return (dist_err < d && angle_err < a) ? SpaceKind::k3DoF : SpaceKind::k4DoF;
}

/// Per row: C_{3->8}, f_v, then the (V_fl, V_rr, delta_fl, delta_rr) slice.
/// A zero-velocity wheel keeps the previous row's steering (zero for row 0).
inline ControlSequence<Space4> convert_3_to_4(const ControlSequence<Space3>& U3, const VehicleGeometry& g) {
  ControlSequence<Space4> out;
  out.reserve(U3.size());
  VehicleCommand8 prev{};
  for (const auto& r : U3) {
    prev = command_from_control3({r[0], r[1], r[2]}, g, prev);
    const Control4 c = extract_fl_rr(prev);
    out.push_back({c.v_fl, c.v_rr, c.delta_fl, c.delta_rr});
  }
  return out;
}

/// Per row: expand_4, then the averaging reduction, clamped to 3DoF bounds.
inline ControlSequence<Space3> convert_4_to_3(const ControlSequence<Space4>& U4, const VehicleGeometry& g,
                                              const ControlLimits& limits) {
  ControlSequence<Space3> out;
  out.reserve(U4.size());
  for (const auto& r : U4) {
    const Control3 u = clamp(control3_from_control4({r[0], r[1], r[2], r[3]}, g), limits);
    out.push_back({u.v_x, u.v_y, u.omega});
  }
  return out;
}

/// Output of one controller tick, independent of the space that produced it.
struct ControlOutput {
  VehicleCommand8 command;
  SpaceKind mode = SpaceKind::k3DoF;
  SolveDiagnostics diagnostics;
};

class HybridMppi {
 public:
  HybridMppi(const MppiConfig& cfg_a, const MppiConfig& cfg_b, const HybridConfig& hcfg,
             const VehicleGeometry& geom)
      : solver_a_(cfg_a, geom), solver_b_(cfg_b, geom), hcfg_(hcfg), geom_(geom) {
    hcfg_.validate();
  }

  ControlOutput step(const Pose2& x0, const CostContext& ctx) {
    const PathErrors e = query_errors(*ctx.path, x0);
    const SpaceKind mode = select_mode(e.dist_err, e.angle_err, hcfg_, last_mode_);
    last_mode_ = mode;
    ControlOutput out;
    out.mode = mode;
    if (mode == SpaceKind::k3DoF) {
      auto r = solver_a_.step(x0, ctx);
      solver_b_.set_sequence(convert_3_to_4(solver_a_.sequence(), geom_));
      solver_b_.set_last_command(r.command);
      out.command = r.command;
      out.diagnostics = std::move(r.diagnostics);
    } else {
      auto r = solver_b_.step(x0, ctx);
      solver_a_.set_sequence(convert_4_to_3(solver_b_.sequence(), geom_, solver_a_.config().limits));
      solver_a_.set_last_command(r.command);
      out.command = r.command;
      out.diagnostics = std::move(r.diagnostics);
    }
    return out;
  }

  const MppiSolver<Space3>& space_a() const { return solver_a_; }
  const MppiSolver<Space4>& space_b() const { return solver_b_; }
  const HybridConfig& config() const { return hcfg_; }

 private:
  MppiSolver<Space3> solver_a_;
  MppiSolver<Space4> solver_b_;
  HybridConfig hcfg_;
  VehicleGeometry geom_;
  std::optional<SpaceKind> last_mode_;
};

}  // namespace swerve
