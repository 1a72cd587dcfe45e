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

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "hact/simworld/sim.hpp"

namespace hact::sim {

enum class ScriptPhase { kApproach, kDescend, kClose, kDwell, kLift, kTransport, kLower, kOpen, kRetreat };

std::string_view phase_name(ScriptPhase phase);

/// Waypoint state machine that picks the block and drops it in the basket.
/// Fingers close until each fingertip reaches the soft-grasp set-point, so the
/// recorded forces predict when closure stops. Waypoints carry per-episode
/// Gaussian jitter drawn from the seed.
class ScriptedPolicy {
 public:
  ScriptedPolicy(const Simulator& sim, std::uint64_t seed);

  Action next_action(const SimState& state);

  ScriptPhase phase() const { return phase_; }

 private:
  void enter(ScriptPhase phase, const SimState& state);
  Eigen::Vector3d phase_goal(ScriptPhase phase, const SimState& state) const;
  int phase_duration(ScriptPhase phase) const;
  ArmVector arm_toward(const Eigen::Vector3d& position, const SimState& state) const;

  const Simulator* sim_;
  ScriptPhase phase_ = ScriptPhase::kApproach;
  std::int64_t phase_start_step_ = 0;
  Eigen::Vector3d phase_start_position_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d phase_goal_ = Eigen::Vector3d::Zero();
  bool started_ = false;

  Eigen::Vector3d grasp_offset_noise_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d transport_noise_ = Eigen::Vector3d::Zero();
  double lift_noise_ = 0.0;
  // Block centre height relative to the palm while holding it.
  double grasp_hand_height_ = 0.0;
  HandVector hand_target_ = HandVector::Zero();
  double thumb_yaw_goal_ = 0.0;
};

}  // namespace hact::sim
