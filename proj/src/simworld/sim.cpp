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

#include "hact/simworld/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hact::sim {

namespace {

double rate_limited(double current, double target, double limit) {
  return current + std::clamp(target - current, -limit, limit);
}

// Elbow-up seed for the ready-pose solve.
ArmVector ready_guess() {
  ArmVector q;
  q << 0.0, 0.5, 0.0, 1.5, 0.0, 1.14, 0.0;
  return q;
}

}  // namespace

JointVector SimState::joints() const {
  JointVector q;
  q << arm, hand;
  return q;
}

Simulator::Simulator(SimConfig config)
    : config_(std::move(config)), kinematics_(config_) {
  config_.validate();
  Pose ready;
  ready.position = Eigen::Vector3d(config_.ready_position[0], config_.ready_position[1],
                                   config_.ready_position[2]);
  ready.orientation = downward_orientation();
  ready_joints_ = kinematics_.inverse(ready, ready_guess());
}

SimState Simulator::reset(std::uint64_t seed) const {
  SimState s;
  s.seed = seed;
  s.arm = ready_joints_;
  s.hand.setZero();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, config_.block_jitter_sigma);
  const double lim = config_.block_jitter_max;
  const double dx = std::clamp(jitter(rng), -lim, lim);
  const double dy = std::clamp(jitter(rng), -lim, lim);
  s.object_position = Eigen::Vector3d(config_.block_nominal[0] + dx,
                                      config_.block_nominal[1] + dy, config_.block_nominal[2]);
  s.object_orientation = Eigen::Quaterniond::Identity();
  s.contact_forces = compute_contact_forces(s);
  return s;
}

Eigen::Isometry3d Simulator::hand_frame(const SimState& state) const {
  // Same chain as ArmKinematics::forward, without the limit check: the state
  // is clamped on every step.
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < kArmDof; ++i) {
    t.rotate(Eigen::AngleAxisd(state.arm(i), i % 2 == 0 ? Eigen::Vector3d::UnitZ()
                                                         : Eigen::Vector3d::UnitY()));
    t.translate(Eigen::Vector3d(0.0, 0.0, config_.link_lengths[i]));
  }
  return t;
}

Eigen::Isometry3d Simulator::object_frame(const SimState& state) const {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = state.object_orientation.toRotationMatrix();
  t.translation() = state.object_position;
  return t;
}

HandGeometry Simulator::hand_geometry(const Eigen::Isometry3d& frame,
                                      const HandVector& hand) const {
  HandGeometry g;
  const double z0 = config_.palm_depth;
  const double x0 = config_.finger_base_offset;

  // Thumb opposes the fingers from -x; yaw swings its closing plane about z.
  const double yaw = hand(0);
  const double pitch = hand(1);
  const Eigen::Vector3d thumb_root(-x0, 0.0, z0);
  const Eigen::Vector3d thumb_tip =
      thumb_root + config_.thumb_length * Eigen::Vector3d(std::sin(pitch) * std::cos(yaw),
                                                          std::sin(pitch) * std::sin(yaw),
                                                          std::cos(pitch));
  g.roots[0] = frame * thumb_root;
  g.tips[0] = frame * thumb_tip;

  for (int f = 0; f < 4; ++f) {
    const double q = hand(2 + f);
    const Eigen::Vector3d root(x0, config_.finger_lateral[f], z0);
    const Eigen::Vector3d tip =
        root + config_.finger_length * Eigen::Vector3d(-std::sin(q), 0.0, std::cos(q));
    g.roots[f + 1] = frame * root;
    g.tips[f + 1] = frame * tip;
  }
  return g;
}

double Simulator::contact_force(double depth) const {
  if (!(depth > 0.0)) return 0.0;
  return std::min(config_.force_cap, config_.contact_stiffness * depth);
}

double Simulator::block_signed_distance(const SimState& state,
                                        const Eigen::Vector3d& point) const {
  const Eigen::Vector3d local = object_frame(state).inverse() * point;
  const Eigen::Vector3d q = local.cwiseAbs() - Eigen::Vector3d::Constant(config_.block_half_extent);
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

std::array<double, kFingerCount> Simulator::compute_contact_forces(const SimState& state) const {
  std::array<double, kFingerCount> forces{};
  if (!state.object_present) return forces;
  const HandGeometry g = hand_geometry(hand_frame(state), state.hand);
  for (int f = 0; f < kFingerCount; ++f) {
    const double depth = config_.tip_radius - block_signed_distance(state, g.tips[f]);
    forces[f] = contact_force(depth);
  }
  return forces;
}

void Simulator::update_attachment(SimState& state) const {
  const auto& f = state.contact_forces;
  const double opposing = *std::max_element(f.begin() + 1, f.end());
  if (!state.object_attached) {
    if (state.object_present && f[0] > config_.grasp_threshold &&
        opposing > config_.grasp_threshold) {
      state.object_attached = true;
      state.object_in_hand = hand_frame(state).inverse() * object_frame(state);
    }
  } else if (f[0] < config_.release_threshold && opposing < config_.release_threshold) {
    state.object_attached = false;
    // A released block drops onto the basket floor when its centre is over
    // the basket opening, onto the table otherwise.
    const Eigen::Vector3d& p = state.object_position;
    const bool over_basket = std::abs(p.x() - config_.basket_center[0]) <= config_.basket_inner_half &&
                             std::abs(p.y() - config_.basket_center[1]) <= config_.basket_inner_half;
    const double rest = over_basket ? config_.basket_center[2] + config_.block_half_extent
                                    : config_.block_nominal[2];
    state.object_position.z() = std::min(p.z(), rest);
    state.contact_forces = compute_contact_forces(state);
  }
}

SimState Simulator::step(const SimState& state, const Action& action) const {
  if (!action.allFinite()) throw InvalidActionError("action contains NaN or infinite target");

  SimState next = state;
  for (int i = 0; i < kArmDof; ++i) {
    double target = action(i);
    const auto& limit = config_.arm_limits[i];
    if (!limit.continuous) target = std::clamp(target, limit.lower, limit.upper);
    next.arm(i) = rate_limited(state.arm(i), target, config_.arm_rate_limit);
  }
  for (int i = 0; i < kHandDof; ++i) {
    const auto& limit = config_.hand_limits[i];
    const double target = std::clamp(action(kArmDof + i), limit.lower, limit.upper);
    next.hand(i) = rate_limited(state.hand(i), target, config_.hand_rate_limit);
  }

  if (next.object_attached) {
    const Eigen::Isometry3d obj = hand_frame(next) * next.object_in_hand;
    next.object_position = obj.translation();
    next.object_orientation = Eigen::Quaterniond(obj.linear()).normalized();
  }
  next.contact_forces = compute_contact_forces(next);
  update_attachment(next);
  ++next.step;
  return next;
}

bool Simulator::in_basket(const SimState& state) const {
  if (!state.object_present || state.object_attached) return false;
  const Eigen::Vector3d& p = state.object_position;
  return std::abs(p.x() - config_.basket_center[0]) <= config_.basket_inner_half &&
         std::abs(p.y() - config_.basket_center[1]) <= config_.basket_inner_half &&
         p.z() <= config_.basket_center[2] + config_.basket_wall_height;
}

}  // namespace hact::sim
