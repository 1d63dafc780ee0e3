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
/// Model Predictive Path-Integral solver, generic over the sampling space.
///
/// One solve:
///   1. draw K noise sequences (counter-addressed, so worker count is
///      irrelevant to the result),
///   2. build candidates: the first ceil((1 - alpha) K) perturb the warm start,
///      the rest are pure noise; every row is clamped,
///   3. roll every candidate through the kinematic model and accumulate the
///      stage and terminal costs,
///   4. weight candidates by exp(-(S_k - min S) / lambda) / eta,
///   5. add the weighted noise to the mean, emit the first row as a vehicle
///      command and shift the sequence.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swerve_mppi/counter_rng.hpp"
#include "swerve_mppi/jacobian.hpp"
#include "swerve_mppi/kinematics.hpp"
#include "swerve_mppi/planner.hpp"
#include "swerve_mppi/world.hpp"

namespace swerve {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TailInit { kCopyLast, kZero };

struct MppiConfig {
  int K = 3000;
  int T = 30;
  double dt = 0.033;
  double alpha = 0.1;
  double lambda = 250.0;
  double gamma = 6.25;
  SpaceKind space = SpaceKind::k3DoF;
  std::vector<double> sigma{1.0, 1.0, 0.78};  ///< per-dimension standard deviations
  ControlLimits limits{};
  std::uint64_t seed = 0;
  int workers = 1;
  TailInit tail_init = TailInit::kCopyLast;

  std::size_t dim() const { return space == SpaceKind::k3DoF ? 3 : 4; }

  /// Number of candidates k with k < (1 - alpha) K.
  int exploitation_count() const {
    return std::clamp(static_cast<int>(std::ceil((1.0 - alpha) * K - 1e-9)), 0, K);
  }

  void validate() const {
    if (K < 1) throw ConfigError("mppi: K must be >= 1");
    if (T < 1) throw ConfigError("mppi: T must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("mppi: dt must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("mppi: alpha must lie in [0, 1]");
    if (!(lambda > 0.0)) throw ConfigError("mppi: lambda must be positive");
    if (!(gamma >= 0.0)) throw ConfigError("mppi: gamma must be non-negative");
    if (sigma.size() != dim()) {
      throw ConfigError("mppi: sigma has " + std::to_string(sigma.size()) + " entries, the " +
                        to_string(space) + " space needs " + std::to_string(dim()));
    }
    for (double s : sigma) {
      if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("mppi: sigma entries must be positive");
    }
    if (!(limits.v_max > 0.0) || !(limits.omega_max > 0.0) || !(limits.steer_max > 0.0)) {
      throw ConfigError("mppi: control limits must be positive");
    }
    if (workers < 1) throw ConfigError("mppi: workers must be >= 1");
  }
};

struct CostWeights {
  double w_dist = 40.0;
  double w_angle = 30.0;
  double w_speed = 10.0;
  double w_collision = 50.0;
  double w_goal = 50.0;
  double v_des = 2.0;  ///< target speed [m/s]

  void validate() const {
    for (double w : {w_dist, w_angle, w_speed, w_collision, w_goal}) {
      if (!(w >= 0.0)) throw ConfigError("cost weights must be non-negative");
    }
  }
};

// ---------------------------------------------------------------------------
// Sampling spaces

struct Space3 {
  static constexpr SpaceKind kKind = SpaceKind::k3DoF;
  static constexpr std::size_t kDim = 3;
  using Row = std::array<double, 3>;

  static Row lower(const ControlLimits& l) { return {-l.v_max, -l.v_max, -l.omega_max}; }
  static Row upper(const ControlLimits& l) { return {l.v_max, l.v_max, l.omega_max}; }

  static Control3 to_control3(const Row& r, const VehicleGeometry&, const ControlLimits& l) {
    return clamp(Control3{r[0], r[1], r[2]}, l);
  }
};

/// Rows are (V_fl, V_rr, delta_fl, delta_rr). The implied center twist is
/// clamped to the twist limits as well.
struct Space4 {
  static constexpr SpaceKind kKind = SpaceKind::k4DoF;
  static constexpr std::size_t kDim = 4;
  using Row = std::array<double, 4>;

  static Row lower(const ControlLimits& l) { return {-l.v_max, -l.v_max, -l.steer_max, -l.steer_max}; }
  static Row upper(const ControlLimits& l) { return {l.v_max, l.v_max, l.steer_max, l.steer_max}; }

  static Control3 to_control3(const Row& r, const VehicleGeometry& g, const ControlLimits& l) {
    return clamp(control3_from_control4({r[0], r[1], r[2], r[3]}, g), l);
  }
};

template <class Space>
using ControlSequence = std::vector<typename Space::Row>;

template <class Space>
typename Space::Row clamp_row(typename Space::Row r, const ControlLimits& l) {
  const auto lo = Space::lower(l);
  const auto hi = Space::upper(l);
  for (std::size_t d = 0; d < Space::kDim; ++d) r[d] = std::clamp(r[d], lo[d], hi[d]);
  return r;
}

// ---------------------------------------------------------------------------
// Noise and candidates

/// Noise row for candidate k at step t: independent N(0, sigma_d^2) per
/// dimension, addressed by (seed, iteration, k, t, dimension pair).
template <class Space>
typename Space::Row noise_row(const MppiConfig& cfg, std::span<const double> stddev,
                              std::uint64_t iteration, int k, int t) {
  typename Space::Row r{};
  for (std::size_t lane = 0; 2 * lane < Space::kDim; ++lane) {
    const auto [a, b] = gaussian_pair({cfg.seed, iteration, static_cast<std::uint64_t>(k),
                                       static_cast<std::uint64_t>(t), lane});
    r[2 * lane] = a * stddev[2 * lane];
    if (2 * lane + 1 < Space::kDim) r[2 * lane + 1] = b * stddev[2 * lane + 1];
  }
  return r;
}

inline std::vector<double> standard_deviations(const MppiConfig& cfg) { return cfg.sigma; }

/// K x T noise rows, sample-major.
template <class Space>
ControlSequence<Space> sample_noise(const MppiConfig& cfg, std::uint64_t iteration) {
  cfg.validate();
  if (cfg.dim() != Space::kDim) throw ConfigError("sample_noise: configured space does not match");
  const auto stddev = standard_deviations(cfg);
  ControlSequence<Space> out(static_cast<std::size_t>(cfg.K) * cfg.T);
  for (int k = 0; k < cfg.K; ++k) {
    for (int t = 0; t < cfg.T; ++t) {
      out[static_cast<std::size_t>(k) * cfg.T + t] = noise_row<Space>(cfg, stddev, iteration, k, t);
    }
  }
  return out;
}

template <class Space>
typename Space::Row make_candidate_row(const typename Space::Row& mean, const typename Space::Row& eps,
                                       bool exploit, const ControlLimits& l) {
  typename Space::Row v = eps;
  if (exploit) {
    for (std::size_t d = 0; d < Space::kDim; ++d) v[d] += mean[d];
  }
  return clamp_row<Space>(v, l);
}

/// Candidates k < (1 - alpha) K are U + eps_k, the rest eps_k alone; all
/// rows clamped.
template <class Space>
ControlSequence<Space> build_candidates(const ControlSequence<Space>& U, const ControlSequence<Space>& noise,
                                        const MppiConfig& cfg) {
  const std::size_t T = static_cast<std::size_t>(cfg.T);
  if (U.size() != T || noise.size() != T * static_cast<std::size_t>(cfg.K)) {
    throw ConfigError("build_candidates: sequence or noise shape does not match the configuration");
  }
  const int n_exploit = cfg.exploitation_count();
  ControlSequence<Space> out(noise.size());
  for (int k = 0; k < cfg.K; ++k) {
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t i = static_cast<std::size_t>(k) * T + t;
      out[i] = make_candidate_row<Space>(U[t], noise[i], k < n_exploit, cfg.limits);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Costs

/// World model shared read-only by every rollout.
struct CostContext {
  const InflatedGrid* grid = nullptr;
  const ReferencePath* path = nullptr;
  Pose2 goal{};
  CostWeights weights{};
  VehicleGeometry geometry{};
};

/// Unweighted stage-cost terms.
struct StageTerms {
  double dist = 0.0;       ///< squared distance to the path
  double angle = 0.0;      ///< squared heading error
  double speed = 0.0;      ///< squared deviation from v_des
  double collision = 0.0;  ///< 0 or 1
  double cmd = 0.0;        ///< distance to the previous vehicle command
  double coupling = 0.0;   ///< gamma u^T Sigma^-1 v

  double total(const CostWeights& w) const {
    return w.w_dist * dist + w.w_angle * angle + w.w_speed * speed + w.w_collision * collision + cmd +
           coupling;
  }
};

/// gamma * mean^T Sigma^-1 candidate, same time index, with
/// Sigma = diag(sigma^2).
template <std::size_t N>
double coupling_term(const std::array<double, N>& mean, const std::array<double, N>& cand,
                     std::span<const double> sigma, double gamma) {
  double s = 0.0;
  for (std::size_t d = 0; d < N; ++d) s += mean[d] * cand[d] / (sigma[d] * sigma[d]);
  return gamma * s;
}

inline StageTerms stage_terms(const Pose2& p, const Control3& applied, const VehicleCommand8& cmd,
                              const VehicleCommand8& prev_cmd, double coupling, const CostContext& ctx) {
  const PathErrors e = query_errors(*ctx.path, p);
  const double speed = std::sqrt(applied.v_x * applied.v_x + applied.v_y * applied.v_y);
  StageTerms st;
  st.dist = e.dist_err * e.dist_err;
  st.angle = e.angle_err * e.angle_err;
  st.speed = (speed - ctx.weights.v_des) * (speed - ctx.weights.v_des);
  st.collision = in_collision(*ctx.grid, p);
  st.cmd = cmd.distance_to(prev_cmd);
  st.coupling = coupling;
  return st;
}

/// Stage cost of candidate row `cand` (mean row `mean`) evaluated at the
/// pose it leads to.
template <class Space>
double stage_cost(const Pose2& p, const typename Space::Row& cand, const typename Space::Row& mean,
                  const VehicleCommand8& prev_cmd, const CostContext& ctx, const MppiConfig& cfg) {
  const Control3 u3 = Space::to_control3(cand, ctx.geometry, cfg.limits);
  const VehicleCommand8 cmd = command_from_control3(u3, ctx.geometry, prev_cmd);
  const double c = coupling_term(mean, cand, cfg.sigma, cfg.gamma);
  return stage_terms(p, u3, cmd, prev_cmd, c, ctx).total(ctx.weights);
}

inline double terminal_cost(const Pose2& p, const Pose2& goal, const CostWeights& w) {
  const double dx = p.x - goal.x;
  const double dy = p.y - goal.y;
  return w.w_goal * (dx * dx + dy * dy);
}

struct RolloutResult {
  double cost = 0.0;
  std::vector<Pose2> poses;       ///< pose after each step
  std::vector<int> collisions;    ///< collision flag after each step
};

/// Rolls one candidate through the kinematic model. `mean` is the sequence
/// the candidate was sampled around; `prev_cmd` the last command sent.
template <class Space, bool kRecord = true>
RolloutResult rollout(const Pose2& x0, std::span<const typename Space::Row> cand,
                      std::span<const typename Space::Row> mean, const VehicleCommand8& prev_cmd,
                      const CostContext& ctx, const MppiConfig& cfg) {
  RolloutResult r;
  if constexpr (kRecord) {
    r.poses.reserve(cand.size());
    r.collisions.reserve(cand.size());
  }
  Pose2 x = x0;
  VehicleCommand8 prev = prev_cmd;
  double S = 0.0;
  for (std::size_t t = 0; t < cand.size(); ++t) {
    const Control3 u3 = Space::to_control3(cand[t], ctx.geometry, cfg.limits);
    x = propagate(x, u3, cfg.dt);
    const VehicleCommand8 cmd = command_from_control3(u3, ctx.geometry, prev);
    const double c = coupling_term(mean[t], cand[t], cfg.sigma, cfg.gamma);
    const StageTerms st = stage_terms(x, u3, cmd, prev, c, ctx);
    S += st.total(ctx.weights);
    prev = cmd;
    if constexpr (kRecord) {
      r.poses.push_back(x);
      r.collisions.push_back(static_cast<int>(st.collision));
    }
  }
  r.cost = S + terminal_cost(x, ctx.goal, ctx.weights);
  return r;
}

/// w_k = exp(-(S_k - rho) / lambda) / eta with rho = min S.
inline std::vector<double> compute_weights(std::span<const double> S, double lambda) {
  if (S.empty()) return {};
  if (!(lambda > 0.0)) throw ConfigError("compute_weights: lambda must be positive");
  const double rho = *std::min_element(S.begin(), S.end());
  std::vector<double> w(S.size());
  double eta = 0.0;
  for (std::size_t k = 0; k < S.size(); ++k) {
    w[k] = std::exp(-(S[k] - rho) / lambda);
    eta += w[k];
  }
  for (double& wk : w) wk /= eta;
  return w;
}

// ---------------------------------------------------------------------------
// Solver

struct SolveDiagnostics {
  double solve_ms = 0.0;
  double optimal_cost = 0.0;  ///< stage + terminal cost of the updated sequence
  double min_sample_cost = 0.0;
  double mean_sample_cost = 0.0;
  SpaceKind mode = SpaceKind::k3DoF;
  std::vector<Pose2> optimal_poses;
  std::vector<int> optimal_collisions;
};

template <class Space>
struct StepResult {
  VehicleCommand8 command;
  typename Space::Row u0{};
  ControlSequence<Space> optimal;  ///< updated sequence before the shift
  SolveDiagnostics diagnostics;
};

template <class Space>
class MppiSolver {
 public:
  using Row = typename Space::Row;

  MppiSolver(MppiConfig cfg, VehicleGeometry geom) : cfg_(std::move(cfg)), geom_(geom) {
    cfg_.space = Space::kKind;
    cfg_.validate();
    geom_.validate();
    stddev_ = standard_deviations(cfg_);
    U_.assign(static_cast<std::size_t>(cfg_.T), Row{});
    candidates_.resize(static_cast<std::size_t>(cfg_.K) * cfg_.T);
    noise_.resize(candidates_.size());
    costs_.resize(static_cast<std::size_t>(cfg_.K));
  }

  const MppiConfig& config() const { return cfg_; }
  const ControlSequence<Space>& sequence() const { return U_; }
  const VehicleCommand8& last_command() const { return prev_cmd_; }
  std::uint64_t iteration() const { return iteration_; }

  /// Replaces the warm start; rows are clamped to the space bounds.
  void set_sequence(const ControlSequence<Space>& U) {
    if (U.size() != U_.size()) throw ConfigError("set_sequence: length does not match T");
    for (std::size_t t = 0; t < U.size(); ++t) U_[t] = clamp_row<Space>(U[t], cfg_.limits);
  }

  void set_last_command(const VehicleCommand8& cmd) { prev_cmd_ = cmd; }

  /// Costs of the last solve's candidates, in sample order.
  const std::vector<double>& sample_costs() const { return costs_; }
  const ControlSequence<Space>& candidates() const { return candidates_; }
  const ControlSequence<Space>& noise() const { return noise_; }

  StepResult<Space> step(const Pose2& x0, const CostContext& ctx) {
    const auto t_start = std::chrono::steady_clock::now();
    const int K = cfg_.K;
    const std::size_t T = static_cast<std::size_t>(cfg_.T);
    const int n_exploit = cfg_.exploitation_count();
    const std::uint64_t iteration = iteration_++;
    const std::span<const Row> mean(U_);

#pragma omp parallel for num_threads(cfg_.workers) schedule(static)
    for (int k = 0; k < K; ++k) {
      Row* rows = candidates_.data() + static_cast<std::size_t>(k) * T;
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t i = static_cast<std::size_t>(k) * T + t;
        noise_[i] = noise_row<Space>(cfg_, stddev_, iteration, k, static_cast<int>(t));
        rows[t] = make_candidate_row<Space>(U_[t], noise_[i], k < n_exploit, cfg_.limits);
      }
      costs_[static_cast<std::size_t>(k)] =
          rollout<Space, false>(x0, std::span<const Row>(rows, T), mean, prev_cmd_, ctx, cfg_).cost;
    }

    const std::vector<double> w = compute_weights(costs_, cfg_.lambda);

    // U + sum_k w_k eps_k with the raw noise, reduced in sample order, then
    // clamped. Exploration samples contribute their noise, not their value.
    StepResult<Space> out;
    out.optimal = U_;
    for (int k = 0; k < K; ++k) {
      const Row* eps = noise_.data() + static_cast<std::size_t>(k) * T;
      const double wk = w[static_cast<std::size_t>(k)];
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t d = 0; d < Space::kDim; ++d) out.optimal[t][d] += wk * eps[t][d];
      }
    }
    for (auto& row : out.optimal) row = clamp_row<Space>(row, cfg_.limits);

    const RolloutResult best =
        rollout<Space, true>(x0, std::span<const Row>(out.optimal), mean, prev_cmd_, ctx, cfg_);

    out.u0 = out.optimal.front();
    out.command = command_from_control3(Space::to_control3(out.u0, geom_, cfg_.limits), geom_, prev_cmd_);
    prev_cmd_ = out.command;

    // Shift; the freed tail row either repeats the last row or is zeroed.
    for (std::size_t t = 0; t + 1 < T; ++t) U_[t] = out.optimal[t + 1];
    U_[T - 1] = cfg_.tail_init == TailInit::kCopyLast ? out.optimal[T - 1] : Row{};

    double sum = 0.0;
    for (double c : costs_) sum += c;
    SolveDiagnostics& d = out.diagnostics;
    d.optimal_cost = best.cost;
    d.min_sample_cost = *std::min_element(costs_.begin(), costs_.end());
    d.mean_sample_cost = sum / K;
    d.mode = Space::kKind;
    d.optimal_poses = best.poses;
    d.optimal_collisions = best.collisions;
    d.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    return out;
  }

 private:
  MppiConfig cfg_;
  VehicleGeometry geom_;
  std::vector<double> stddev_;
  ControlSequence<Space> U_;
  ControlSequence<Space> candidates_;
  ControlSequence<Space> noise_;
  std::vector<double> costs_;
  VehicleCommand8 prev_cmd_{};
  std::uint64_t iteration_ = 0;
};

}  // namespace swerve
