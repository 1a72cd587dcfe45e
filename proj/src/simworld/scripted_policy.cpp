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

#include "hact/simworld/scripted_policy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hact::sim {

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// One rate-limited step from `from` toward `to`.
double step_toward(double from, double to, double limit) {
  return from + std::clamp(to - from, -limit, limit);
}

}  // namespace

std::string_view phase_name(ScriptPhase phase) {
  switch (phase) {
    case ScriptPhase::kApproach: return "approach";
    case ScriptPhase::kDescend: return "descend";
    case ScriptPhase::kClose: return "close";
    case ScriptPhase::kDwell: return "dwell";
    case ScriptPhase::kLift: return "lift";
    case ScriptPhase::kTransport: return "transport";
    case ScriptPhase::kLower: return "lower";
    case ScriptPhase::kOpen: return "open";
    case ScriptPhase::kRetreat: return "retreat";
  }
  return "unknown";
}

ScriptedPolicy::ScriptedPolicy(const Simulator& sim, std::uint64_t seed) : sim_(&sim) {
  const SimConfig& cfg = sim.config();
  // Separate stream from the block placement drawn in Simulator::reset.
  std::mt19937_64 rng(seed ^ 0x5c2f1e9d3a7b4c61ULL);
  std::normal_distribution<double> waypoint(0.0, cfg.scripted.waypoint_noise);
  std::normal_distribution<double> transport(0.0, cfg.scripted.transport_noise);
  grasp_offset_noise_ = Eigen::Vector3d(waypoint(rng), waypoint(rng), 0.5 * waypoint(rng));
  transport_noise_ = Eigen::Vector3d(transport(rng), transport(rng), 0.0);
  lift_noise_ = transport(rng);

  // Palm height above the block centre at which fingertips meet the block
  // faces at mid height.
  const double reach_x = cfg.finger_base_offset - cfg.block_half_extent - cfg.tip_radius;
  const double contact_angle = std::asin(std::clamp(reach_x / cfg.finger_length, -1.0, 1.0));
  grasp_hand_height_ = cfg.palm_depth + cfg.finger_length * std::cos(contact_angle);
}

int ScriptedPolicy::phase_duration(ScriptPhase phase) const {
  const ScriptedConfig& s = sim_->config().scripted;
  switch (phase) {
    case ScriptPhase::kApproach: return s.approach_steps;
    case ScriptPhase::kDescend: return s.descend_steps;
    case ScriptPhase::kClose: return s.close_timeout_steps;
    case ScriptPhase::kDwell: return s.dwell_steps;
    case ScriptPhase::kLift: return s.lift_steps;
    case ScriptPhase::kTransport: return s.transport_steps;
    case ScriptPhase::kLower: return s.lower_steps;
    case ScriptPhase::kOpen: return s.open_steps;
    case ScriptPhase::kRetreat: return 40;
  }
  return 1;
}

Eigen::Vector3d ScriptedPolicy::phase_goal(ScriptPhase phase, const SimState& state) const {
  const SimConfig& cfg = sim_->config();
  const Eigen::Vector3d hand = sim_->hand_frame(state).translation();
  const Eigen::Vector3d grasp = state.object_position +
                                Eigen::Vector3d(0.0, 0.0, grasp_hand_height_) +
                                grasp_offset_noise_;
  switch (phase) {
    case ScriptPhase::kApproach:
      return grasp + Eigen::Vector3d(0.0, 0.0, cfg.scripted.pregrasp_height);
    case ScriptPhase::kDescend:
      return grasp;
    case ScriptPhase::kLift:
      return hand + Eigen::Vector3d(0.0, 0.0, cfg.scripted.lift_height + lift_noise_);
    case ScriptPhase::kTransport: {
      // Carry the block, not the palm, over the basket centre.
      const Eigen::Vector3d offset = hand - state.object_position;
      Eigen::Vector3d goal(cfg.basket_center[0], cfg.basket_center[1], 0.0);
      goal += transport_noise_ + offset;
      goal.z() = hand.z();
      return goal;
    }
    case ScriptPhase::kLower: {
      const double offset = hand.z() - state.object_position.z();
      return Eigen::Vector3d(hand.x(), hand.y(),
                             cfg.basket_center[2] + cfg.scripted.release_height + offset);
    }
    case ScriptPhase::kRetreat:
      return hand + Eigen::Vector3d(0.0, 0.0, 0.1);
    default:
      return hand;
  }
}

void ScriptedPolicy::enter(ScriptPhase phase, const SimState& state) {
  phase_ = phase;
  phase_start_step_ = state.step;
  phase_start_position_ = sim_->hand_frame(state).translation();
  phase_goal_ = phase_goal(phase, state);
}

ArmVector ScriptedPolicy::arm_toward(const Eigen::Vector3d& position,
                                     const SimState& state) const {
  Pose target;
  target.position = position;
  target.orientation = downward_orientation();
  try {
    return sim_->kinematics().inverse(target, state.arm);
  } catch (const UnreachableTargetError&) {
    return state.arm;
  }
}

Action ScriptedPolicy::next_action(const SimState& state) {
  const SimConfig& cfg = sim_->config();
  const ScriptedConfig& s = cfg.scripted;
  if (!started_) {
    started_ = true;
    hand_target_ = state.hand;
    thumb_yaw_goal_ = state.hand(0);
    enter(ScriptPhase::kApproach, state);
  }

  const std::int64_t elapsed = state.step - phase_start_step_;
  const bool timed_out = elapsed >= phase_duration(phase_);

  switch (phase_) {
    case ScriptPhase::kApproach:
      if (timed_out) enter(ScriptPhase::kDescend, state);
      break;
    case ScriptPhase::kDescend:
      if (timed_out) {
        enter(ScriptPhase::kClose, state);
        thumb_yaw_goal_ = s.thumb_yaw_grasp;
      }
      break;
    case ScriptPhase::kClose: {
      bool all_reached = true;
      for (int f = 0; f < kFingerCount; ++f) {
        const int joint = f + 1;  // thumb pitch, index..pinky
        const double force = state.contact_forces[f];
        double target = state.hand(joint);
        if (force >= s.soft_grasp_setpoint) {
          // hold
        } else if (force > 0.0) {
          target += s.closure_slow_step;
          all_reached = false;
        } else {
          target += cfg.hand_rate_limit;
          all_reached = false;
        }
        hand_target_(joint) = target;
      }
      if (all_reached || timed_out) {
        hand_target_.tail<kFingerCount>() = state.hand.tail<kFingerCount>();
        enter(ScriptPhase::kDwell, state);
      }
      break;
    }
    case ScriptPhase::kDwell:
      if (timed_out) enter(ScriptPhase::kLift, state);
      break;
    case ScriptPhase::kLift:
      if (timed_out) enter(ScriptPhase::kTransport, state);
      break;
    case ScriptPhase::kTransport:
      if (timed_out) enter(ScriptPhase::kLower, state);
      break;
    case ScriptPhase::kLower:
      if (timed_out) {
        enter(ScriptPhase::kOpen, state);
        thumb_yaw_goal_ = 0.0;
      }
      break;
    case ScriptPhase::kOpen:
      if (timed_out) enter(ScriptPhase::kRetreat, state);
      break;
    case ScriptPhase::kRetreat:
      break;
  }

  // Hand targets move at most one rate-limited step ahead of the hand, so the
  // recorded actions ramp instead of jumping.
  hand_target_(0) = step_toward(state.hand(0), thumb_yaw_goal_, cfg.hand_rate_limit);
  if (phase_ == ScriptPhase::kOpen || phase_ == ScriptPhase::kRetreat) {
    for (int j = 1; j < hand_target_.size(); ++j) {
      hand_target_(j) = step_toward(state.hand(j), 0.0, cfg.hand_rate_limit);
    }
  }

  const double t = static_cast<double>(state.step - phase_start_step_) /
                   std::max(1, phase_duration(phase_));
  const Eigen::Vector3d position =
      phase_start_position_ + smoothstep(t) * (phase_goal_ - phase_start_position_);

  Action action;
  action << arm_toward(position, state), hand_target_;
  return action;
}

}  // namespace hact::sim
