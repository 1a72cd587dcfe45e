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
#include <cstdint>

#include <Eigen/Geometry>

#include "hact/error.hpp"
#include "hact/simworld/config.hpp"
#include "hact/simworld/kinematics.hpp"

namespace hact::sim {

class InvalidActionError : public Error {
 public:
  using Error::Error;
};

/// Full simulator state. Copyable value; a Simulator never mutates one in place.
struct SimState {
  ArmVector arm = ArmVector::Zero();
  HandVector hand = HandVector::Zero();
  Eigen::Vector3d object_position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond object_orientation = Eigen::Quaterniond::Identity();
  bool object_attached = false;
  bool object_present = true;
  // Object pose in the end-effector frame, valid while attached.
  Eigen::Isometry3d object_in_hand = Eigen::Isometry3d::Identity();
  std::array<double, kFingerCount> contact_forces{};  // thumb..pinky, N
  std::int64_t step = 0;
  std::uint64_t seed = 0;

  JointVector joints() const;
};

/// Fingertip sphere centres, thumb..pinky, plus the finger root points.
struct HandGeometry {
  std::array<Eigen::Vector3d, kFingerCount> tips;
  std::array<Eigen::Vector3d, kFingerCount> roots;
};

/// Deterministic kinematic pick-and-place world.
///
/// Joints track commanded targets with a per-step rate limit. Each fingertip
/// is a sphere; its contact force is stiffness times penetration into the
/// block, saturated at the configured cap. The block attaches to the hand
/// once the thumb and at least one opposing finger push harder than the
/// grasp threshold, and detaches when the thumb and all opposing fingers fall
/// under the release threshold. Unattached objects never move.
class Simulator {
 public:
  explicit Simulator(SimConfig config);

  const SimConfig& config() const { return config_; }
  const ArmKinematics& kinematics() const { return kinematics_; }

  // Ready arm pose with the block placed from `seed`.
  SimState reset(std::uint64_t seed) const;

  // Throws InvalidActionError on non-finite targets.
  SimState step(const SimState& state, const Action& action) const;

  HandGeometry hand_geometry(const Eigen::Isometry3d& hand_frame, const HandVector& hand) const;
  Eigen::Isometry3d hand_frame(const SimState& state) const;
  Eigen::Isometry3d object_frame(const SimState& state) const;

  // Force from a penetration depth in metres.
  double contact_force(double depth) const;

  // Signed distance from a point to the block surface (negative inside).
  double block_signed_distance(const SimState& state, const Eigen::Vector3d& point) const;

  std::array<double, kFingerCount> compute_contact_forces(const SimState& state) const;

  // Block released inside the basket footprint below the rim.
  bool in_basket(const SimState& state) const;

  const ArmVector& ready_joints() const { return ready_joints_; }

 private:
  void update_attachment(SimState& state) const;

  SimConfig config_;
  ArmKinematics kinematics_;
  ArmVector ready_joints_;
};

}  // namespace hact::sim
