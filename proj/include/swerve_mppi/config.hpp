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
/// Flat `key = value` configuration files. '#' starts a comment; unknown
/// keys are errors. Scenario files use the same format and keys.

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "swerve_mppi/episode.hpp"

namespace swerve {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string where(const ConfigEntry& e) {
  return "line " + std::to_string(e.line) + " ('" + e.key + "')";
}

inline double to_real(const ConfigEntry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config " + where(e) + ": expected a number, got '" + e.value + "'");
}

inline long long to_int(const ConfigEntry& e) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (pos == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config " + where(e) + ": expected an integer, got '" + e.value + "'");
}

inline std::uint64_t to_u64(const ConfigEntry& e) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(e.value, &pos);
    if (pos == e.value.size() && e.value.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config " + where(e) + ": expected a non-negative integer, got '" + e.value + "'");
}

inline bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ConfigError("config " + where(e) + ": expected true or false");
}

inline std::vector<double> to_reals(const ConfigEntry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(to_real({e.key, trim(item), e.line}));
  }
  if (out.empty()) throw ConfigError("config " + where(e) + ": expected a comma-separated list");
  return out;
}

}  // namespace detail

inline std::vector<ConfigEntry> parse_config(std::istream& is) {
  std::vector<ConfigEntry> out;
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    ConfigEntry e{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), n};
    if (e.key.empty()) throw ConfigError("config line " + std::to_string(n) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

using ConfigSetter = std::function<void(EpisodeConfig&, const ConfigEntry&)>;

inline const std::map<std::string, ConfigSetter>& config_setters() {
  using namespace detail;
  static const std::map<std::string, ConfigSetter> table = {
      // MppiConfig
      {"K", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.K = static_cast<int>(to_int(e)); }},
      {"T", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.T = static_cast<int>(to_int(e)); }},
      {"dt", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.dt = to_real(e); }},
      {"alpha", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.alpha = to_real(e); }},
      {"lambda", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.lambda = to_real(e); }},
      {"gamma", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.gamma = to_real(e); }},
      {"workers", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.workers = static_cast<int>(to_int(e)); }},
      {"v_max", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.limits.v_max = to_real(e); }},
      {"omega_max", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.limits.omega_max = to_real(e); }},
      {"steer_max", [](EpisodeConfig& c, const ConfigEntry& e) { c.mppi.limits.steer_max = to_real(e); }},
      {"tail_init",
       [](EpisodeConfig& c, const ConfigEntry& e) {
         if (e.value == "copy") {
           c.mppi.tail_init = TailInit::kCopyLast;
         } else if (e.value == "zero") {
           c.mppi.tail_init = TailInit::kZero;
         } else {
           throw ConfigError("config " + where(e) + ": expected copy or zero");
         }
       }},
      {"sigma_3d_a", [](EpisodeConfig& c, const ConfigEntry& e) { c.sigma_3d_a = to_reals(e); }},
      {"sigma_3d_b", [](EpisodeConfig& c, const ConfigEntry& e) { c.sigma_3d_b = to_reals(e); }},
      {"sigma_4d", [](EpisodeConfig& c, const ConfigEntry& e) { c.sigma_4d = to_reals(e); }},
      // CostWeights
      {"w_dist", [](EpisodeConfig& c, const ConfigEntry& e) { c.weights.w_dist = to_real(e); }},
      {"w_angle", [](EpisodeConfig& c, const ConfigEntry& e) { c.weights.w_angle = to_real(e); }},
      {"w_speed", [](EpisodeConfig& c, const ConfigEntry& e) { c.weights.w_speed = to_real(e); }},
      {"w_collision", [](EpisodeConfig& c, const ConfigEntry& e) { c.weights.w_collision = to_real(e); }},
      {"w_goal", [](EpisodeConfig& c, const ConfigEntry& e) { c.weights.w_goal = to_real(e); }},
      {"v_des", [](EpisodeConfig& c, const ConfigEntry& e) { c.weights.v_des = to_real(e); }},
      // HybridConfig
      {"d_thresh", [](EpisodeConfig& c, const ConfigEntry& e) { c.hybrid.d_thresh = to_real(e); }},
      {"theta_thresh", [](EpisodeConfig& c, const ConfigEntry& e) { c.hybrid.theta_thresh = to_real(e); }},
      {"hysteresis", [](EpisodeConfig& c, const ConfigEntry& e) { c.hybrid.hysteresis = to_real(e); }},
      {"space_a",
       [](EpisodeConfig& c, const ConfigEntry& e) {
         if (e.value == "a") {
           c.hybrid.space_a = Variant3::kA;
         } else if (e.value == "b") {
           c.hybrid.space_a = Variant3::kB;
         } else {
           throw ConfigError("config " + where(e) + ": expected a or b");
         }
       }},
      // VehicleGeometry
      {"l_f", [](EpisodeConfig& c, const ConfigEntry& e) { c.geometry.l_f = to_real(e); }},
      {"l_r", [](EpisodeConfig& c, const ConfigEntry& e) { c.geometry.l_r = to_real(e); }},
      {"d_l", [](EpisodeConfig& c, const ConfigEntry& e) { c.geometry.d_l = to_real(e); }},
      {"d_r", [](EpisodeConfig& c, const ConfigEntry& e) { c.geometry.d_r = to_real(e); }},
      // EpisodeConfig
      {"controller", [](EpisodeConfig& c, const ConfigEntry& e) { c.controller = parse_controller(e.value); }},
      {"episodes", [](EpisodeConfig& c, const ConfigEntry& e) { c.episodes = static_cast<int>(to_int(e)); }},
      {"goal_timeout", [](EpisodeConfig& c, const ConfigEntry& e) { c.goal_timeout = to_real(e); }},
      {"control_interval", [](EpisodeConfig& c, const ConfigEntry& e) { c.control_interval = to_real(e); }},
      {"jobs", [](EpisodeConfig& c, const ConfigEntry& e) { c.jobs = static_cast<int>(to_int(e)); }},
      {"master_seed", [](EpisodeConfig& c, const ConfigEntry& e) { c.master_seed = to_u64(e); }},
      {"goal_pos_tol", [](EpisodeConfig& c, const ConfigEntry& e) { c.goal_pos_tol = to_real(e); }},
      {"goal_yaw_tol", [](EpisodeConfig& c, const ConfigEntry& e) { c.goal_yaw_tol = to_real(e); }},
      {"collision_margin", [](EpisodeConfig& c, const ConfigEntry& e) { c.collision_margin = to_real(e); }},
      {"planning_margin", [](EpisodeConfig& c, const ConfigEntry& e) { c.planning_margin = to_real(e); }},
      {"path_spacing", [](EpisodeConfig& c, const ConfigEntry& e) { c.path_spacing = to_real(e); }},
      {"record_timing", [](EpisodeConfig& c, const ConfigEntry& e) { c.record_timing = to_bool(e); }},
      // Scenario
      {"kind",
       [](EpisodeConfig& c, const ConfigEntry& e) {
         if (e.value == "cylinder_garden") {
           c.scenario.kind = ScenarioKind::kCylinderGarden;
         } else if (e.value == "maze") {
           c.scenario.kind = ScenarioKind::kMaze;
         } else {
           throw ConfigError("config " + where(e) + ": expected cylinder_garden or maze");
         }
       }},
      {"width_m", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.width_m = to_real(e); }},
      {"height_m", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.height_m = to_real(e); }},
      {"resolution", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.resolution = to_real(e); }},
      {"border", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.border = to_bool(e); }},
      {"cylinder_count",
       [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.cylinder_count = static_cast<int>(to_int(e)); }},
      {"cylinder_radius_min", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.cylinder_radius_min = to_real(e); }},
      {"cylinder_radius_max", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.cylinder_radius_max = to_real(e); }},
      {"maze_cell", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.maze_cell = to_real(e); }},
      {"maze_wall_thickness", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.maze_wall_thickness = to_real(e); }},
      {"wall_density", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.wall_density = to_real(e); }},
      {"goal_count",
       [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.goal_count = static_cast<int>(to_int(e)); }},
      {"goal_min_separation", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.goal_min_separation = to_real(e); }},
      {"goal_max_leg", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.goal_max_leg = to_real(e); }},
      {"goal_max_detour", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.goal_max_detour = to_real(e); }},
      {"goal_clearance", [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.goal_clearance = to_real(e); }},
      {"max_rounds",
       [](EpisodeConfig& c, const ConfigEntry& e) { c.scenario.max_rounds = static_cast<int>(to_int(e)); }},
  };
  return table;
}

inline void apply_config(EpisodeConfig& cfg, const std::vector<ConfigEntry>& entries) {
  const auto& setters = config_setters();
  for (const auto& e : entries) {
    const auto it = setters.find(e.key);
    if (it == setters.end()) {
      throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
    it->second(cfg, e);
  }
}

inline void apply_config_text(EpisodeConfig& cfg, const std::string& text) {
  std::istringstream is(text);
  apply_config(cfg, parse_config(is));
}

inline void apply_config_file(EpisodeConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_config(cfg, parse_config(in));
}

/// Built-in scenario names accepted wherever a scenario file is.
inline bool builtin_scenario(const std::string& name, Scenario& out) {
  if (name == "cylinder_garden") {
    out = Scenario{};
    out.kind = ScenarioKind::kCylinderGarden;
    return true;
  }
  if (name == "maze") {
    out = Scenario{};
    out.kind = ScenarioKind::kMaze;
    return true;
  }
  return false;
}

}  // namespace swerve
