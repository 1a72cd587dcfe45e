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

#include <Eigen/Geometry>

#include "hact/error.hpp"
#include "hact/simworld/config.hpp"

namespace hact::sim {

/// End-effector pose: position in metres, unit quaternion orientation.
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Eigen::Isometry3d isometry() const;
  static Pose from_isometry(const Eigen::Isometry3d& transform);
};

// Gripper pointing straight down (palm z axis along world -z).
Eigen::Quaterniond downward_orientation();

class UnreachableTargetError : public Error {
 public:
  UnreachableTargetError(const std::string& what, double position_residual,
                         double orientation_residual)
      : Error(what), position_residual_(position_residual),
        orientation_residual_(orientation_residual) {}

  double position_residual() const { return position_residual_; }
  double orientation_residual() const { return orientation_residual_; }

 private:
  double position_residual_;
  double orientation_residual_;
};

/// Serial 7-DoF chain with alternating z / y revolute axes.
class ArmKinematics {
 public:
  explicit ArmKinematics(const SimConfig& config);

  // Throws DomainError when a non-continuous joint is outside its limits.
  Pose forward(const ArmVector& joints) const;

  // Origins of the base, every joint frame and the end effector (9 points).
  std::array<Eigen::Vector3d, kArmDof + 2> joint_origins(const ArmVector& joints) const;

  Eigen::Matrix<double, 6, kArmDof> jacobian(const ArmVector& joints) const;

  /// Damped least-squares solve of FK(joints) = target starting from `initial`.
  /// Throws UnreachableTargetError if the target is outside the reach sphere
  /// or the iteration ends outside tolerance.
  ArmVector inverse(const Pose& target, const ArmVector& initial) const;

  bool within_limits(const ArmVector& joints) const;
  ArmVector clamp_to_limits(const ArmVector& joints) const;

  Eigen::Vector3d shoulder() const;
  double reach() const;

 private:
  Eigen::Isometry3d chain(const ArmVector& joints,
                          std::array<Eigen::Isometry3d, kArmDof>* frames) const;

  SimConfig config_;
};

Pose forward_kinematics(const SimConfig& config, const ArmVector& joints);
ArmVector inverse_kinematics(const SimConfig& config, const Pose& target,
                             const ArmVector& initial);

}  // namespace hact::sim
