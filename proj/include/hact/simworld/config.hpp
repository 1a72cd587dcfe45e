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

#pragma once

#include <array>
#include <filesystem>

#include <Eigen/Core>

namespace hact::sim {

inline constexpr int kArmDof = 7;
inline constexpr int kHandDof = 6;
inline constexpr int kJointDof = kArmDof + kHandDof;
inline constexpr int kFingerCount = 5;

using ArmVector = Eigen::Matrix<double, kArmDof, 1>;
using HandVector = Eigen::Matrix<double, kHandDof, 1>;
using JointVector = Eigen::Matrix<double, kJointDof, 1>;
using Action = JointVector;

// Hand joint order: thumb yaw, thumb pitch, index, middle, ring, pinky.
enum class HandJoint : int { kThumbYaw, kThumbPitch, kIndex, kMiddle, kRing, kPinky };

struct JointLimit {
  double lower = -3.14159;
  double upper = 3.14159;
  // Continuous joints wrap freely and are never range checked.
  bool continuous = false;

  bool operator==(const JointLimit&) const = default;
};

struct ScriptedConfig {
  double soft_grasp_setpoint = 1.5;     // N, closure stops here
  double closure_slow_step = 0.004;     // rad per step once a finger touches
  double thumb_yaw_grasp = 0.15;        // rad
  double waypoint_noise = 0.003;        // m, sigma of grasp waypoint jitter
  double transport_noise = 0.01;        // m, sigma of basket waypoint jitter
  double pregrasp_height = 0.10;        // m above grasp height
  double lift_height = 0.12;            // m
  double release_height = 0.075;        // m, block centre height when opening
  int approach_steps = 80;
  int descend_steps = 50;
  int close_timeout_steps = 60;
  int dwell_steps = 10;
  int lift_steps = 50;
  int transport_steps = 70;
  int lower_steps = 30;
  int open_steps = 20;

  bool operator==(const ScriptedConfig&) const = default;
};

struct SimConfig {
  double rate_hz = 50.0;
  int image_height = 64;
  int image_width = 64;

  double contact_stiffness = 500.0;   // N/m
  double force_cap = 2.5;             // N, fingertip sensor saturation
  double grasp_threshold = 0.5;       // N
  double release_threshold = 0.1;     // N

  // Offset along each joint's local z after its rotation. Axes alternate
  // z, y, z, y, z, y, z starting at the base.
  std::array<double, kArmDof> link_lengths = {0.267, 0.0, 0.293, 0.0, 0.343, 0.0, 0.12};
  std::array<JointLimit, kArmDof> arm_limits = {{
      {-6.2832, 6.2832, true},
      {-2.05, 2.05, false},
      {-6.2832, 6.2832, false},
      {-0.19, 3.9, false},
      {-6.2832, 6.2832, false},
      {-1.69, 3.14, false},
      {-6.2832, 6.2832, true},
  }};
  std::array<JointLimit, kHandDof> hand_limits = {{
      {0.0, 1.0, false},
      {0.0, 1.2, false},
      {0.0, 1.6, false},
      {0.0, 1.6, false},
      {0.0, 1.6, false},
      {0.0, 1.6, false},
  }};
  double arm_rate_limit = 0.03;   // rad per step
  double hand_rate_limit = 0.04;  // rad per step

  // Hand geometry in the end-effector frame (z points out of the palm).
  double palm_depth = 0.03;
  double finger_base_offset = 0.06;
  std::array<double, 4> finger_lateral = {0.0225, 0.0075, -0.0075, -0.0225};
  double finger_length = 0.07;
  double thumb_length = 0.07;
  double tip_radius = 0.008;

  double block_half_extent = 0.03;
  std::array<double, 3> block_nominal = {0.42, 0.12, 0.03};
  double block_jitter_sigma = 0.006;
  double block_jitter_max = 0.015;

  std::array<double, 3> basket_center = {0.42, -0.18, 0.0};
  double basket_inner_half = 0.07;
  double basket_wall_height = 0.08;
  double basket_wall_thickness = 0.01;

  // Hand pose the arm starts from, gripper pointing down.
  std::array<double, 3> ready_position = {0.35, 0.0, 0.35};

  double ik_damping = 0.1;
  int ik_max_iterations = 100;
  double ik_position_tolerance = 1e-3;
  double ik_orientation_tolerance = 1e-2;

  ScriptedConfig scripted{};

  // Throws ConfigError on non-physical values.
  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

SimConfig load_sim_config(const std::filesystem::path& path);
void save_sim_config(const SimConfig& config, const std::filesystem::path& path);

}  // namespace hact::sim
