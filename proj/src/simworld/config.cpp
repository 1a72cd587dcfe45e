// Copyright 2026 The hapticbench Authors
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

#include "hact/simworld/config.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hact/error.hpp"

namespace hact::sim {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(JointLimit, lower, upper, continuous)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScriptedConfig, soft_grasp_setpoint,
                                                closure_slow_step, thumb_yaw_grasp,
                                                waypoint_noise, transport_noise, pregrasp_height,
                                                lift_height, release_height, approach_steps,
                                                descend_steps, close_timeout_steps, dwell_steps,
                                                lift_steps, transport_steps, lower_steps,
                                                open_steps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    SimConfig, rate_hz, image_height, image_width, contact_stiffness, force_cap,
    grasp_threshold, release_threshold, link_lengths, arm_limits, hand_limits, arm_rate_limit,
    hand_rate_limit, palm_depth, finger_base_offset, finger_lateral, finger_length,
    thumb_length, tip_radius, block_half_extent, block_nominal, block_jitter_sigma,
    block_jitter_max, basket_center, basket_inner_half, basket_wall_height,
    basket_wall_thickness, ready_position, ik_damping, ik_max_iterations,
    ik_position_tolerance, ik_orientation_tolerance, scripted)

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("simconfig: ") + what);
  };
  require(rate_hz > 0.0, "rate_hz must be > 0");
  require(contact_stiffness > 0.0, "contact_stiffness must be > 0");
  require(image_height > 0 && image_width > 0, "image size must be positive");
  require(force_cap > 0.0, "force_cap must be > 0");
  require(release_threshold < grasp_threshold, "release threshold must be below grasp threshold");
  require(arm_rate_limit > 0.0 && hand_rate_limit > 0.0, "rate limits must be > 0");
  require(ik_damping > 0.0 && ik_max_iterations > 0, "invalid IK parameters");
  for (const auto& l : arm_limits) require(l.lower < l.upper, "arm limit lower >= upper");
  for (const auto& l : hand_limits) require(l.lower < l.upper, "hand limit lower >= upper");
  require(scripted.soft_grasp_setpoint > grasp_threshold &&
              scripted.soft_grasp_setpoint < force_cap,
          "soft grasp set-point must lie between grasp threshold and force cap");
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sim config " + path.string());
  SimConfig config;
  try {
    config = nlohmann::json::parse(in).get<SimConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed sim config " + path.string() + ": " + e.what());
  }
  config.validate();
  return config;
}

void save_sim_config(const SimConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write sim config " + path.string());
  out << nlohmann::json(config).dump(2) << '\n';
}

}  // namespace hact::sim
