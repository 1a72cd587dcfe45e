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

#include "hact/simworld/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hact::sim {

namespace {

// z, y, z, y, z, y, z
Eigen::Vector3d joint_axis(int joint) {
  return joint % 2 == 0 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitY();
}

// Rotation vector of target * current^-1, expressed in the world frame.
Eigen::Vector3d orientation_error(const Eigen::Quaterniond& target,
                                  const Eigen::Quaterniond& current) {
  Eigen::Quaterniond delta = target * current.conjugate();
  if (delta.w() < 0.0) delta.coeffs() *= -1.0;
  const Eigen::AngleAxisd aa(delta.normalized());
  return aa.axis() * aa.angle();
}

// Iterate well past the acceptance tolerance so callers get headroom.
constexpr double kTightPosition = 1e-6;
constexpr double kTightOrientation = 1e-5;
constexpr double kMaxJointStep = 0.3;

}  // namespace

Eigen::Isometry3d Pose::isometry() const {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = orientation.normalized().toRotationMatrix();
  t.translation() = position;
  return t;
}

Pose Pose::from_isometry(const Eigen::Isometry3d& transform) {
  Pose p;
  p.position = transform.translation();
  p.orientation = Eigen::Quaterniond(transform.linear()).normalized();
  return p;
}

Eigen::Quaterniond downward_orientation() {
  return Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()));
}

ArmKinematics::ArmKinematics(const SimConfig& config) : config_(config) {}

bool ArmKinematics::within_limits(const ArmVector& joints) const {
  for (int i = 0; i < kArmDof; ++i) {
    const auto& limit = config_.arm_limits[i];
    if (!std::isfinite(joints(i))) return false;
    if (limit.continuous) continue;
    if (joints(i) < limit.lower || joints(i) > limit.upper) return false;
  }
  return true;
}

ArmVector ArmKinematics::clamp_to_limits(const ArmVector& joints) const {
  ArmVector out = joints;
  for (int i = 0; i < kArmDof; ++i) {
    const auto& limit = config_.arm_limits[i];
    if (!limit.continuous) out(i) = std::clamp(out(i), limit.lower, limit.upper);
  }
  return out;
}

Eigen::Isometry3d ArmKinematics::chain(const ArmVector& joints,
                                       std::array<Eigen::Isometry3d, kArmDof>* frames) const {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < kArmDof; ++i) {
    if (frames) (*frames)[i] = t;
    t.rotate(Eigen::AngleAxisd(joints(i), joint_axis(i)));
    t.translate(Eigen::Vector3d(0.0, 0.0, config_.link_lengths[i]));
  }
  return t;
}

Pose ArmKinematics::forward(const ArmVector& joints) const {
  if (!within_limits(joints)) {
    std::ostringstream msg;
    msg << "arm joints outside limits: [" << joints.transpose() << "]";
    throw DomainError(msg.str());
  }
  return Pose::from_isometry(chain(joints, nullptr));
}

std::array<Eigen::Vector3d, kArmDof + 2> ArmKinematics::joint_origins(
    const ArmVector& joints) const {
  std::array<Eigen::Isometry3d, kArmDof> frames;
  const Eigen::Isometry3d ee = chain(joints, &frames);
  std::array<Eigen::Vector3d, kArmDof + 2> out;
  out[0] = Eigen::Vector3d::Zero();
  for (int i = 0; i < kArmDof; ++i) out[i + 1] = frames[i].translation();
  out[kArmDof + 1] = ee.translation();
  // Joint 1 sits at the base; report the top of the first link instead so
  // the list traces the visible chain.
  out[1] = frames[1].translation();
  return out;
}

Eigen::Matrix<double, 6, kArmDof> ArmKinematics::jacobian(const ArmVector& joints) const {
  std::array<Eigen::Isometry3d, kArmDof> frames;
  const Eigen::Vector3d ee = chain(joints, &frames).translation();
  Eigen::Matrix<double, 6, kArmDof> j;
  for (int i = 0; i < kArmDof; ++i) {
    const Eigen::Vector3d axis = frames[i].linear() * joint_axis(i);
    j.block<3, 1>(0, i) = axis.cross(ee - frames[i].translation());
    j.block<3, 1>(3, i) = axis;
  }
  return j;
}

Eigen::Vector3d ArmKinematics::shoulder() const {
  return Eigen::Vector3d(0.0, 0.0, config_.link_lengths[0] + config_.link_lengths[1]);
}

double ArmKinematics::reach() const {
  double r = 0.0;
  for (int i = 2; i < kArmDof; ++i) r += config_.link_lengths[i];
  return r;
}

ArmVector ArmKinematics::inverse(const Pose& target, const ArmVector& initial) const {
  const double distance = (target.position - shoulder()).norm();
  if (distance > reach()) {
    std::ostringstream msg;
    msg << "target " << target.position.transpose() << " is " << distance
        << " m from the shoulder, reach is " << reach() << " m";
    throw UnreachableTargetError(msg.str(), distance - reach(), 0.0);
  }

  const Eigen::Quaterniond goal = target.orientation.normalized();
  const double lambda2 = config_.ik_damping * config_.ik_damping;

  ArmVector joints = clamp_to_limits(initial);
  ArmVector best = joints;
  double best_pos = std::numeric_limits<double>::infinity();
  double best_rot = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter <= config_.ik_max_iterations; ++iter) {
    const Eigen::Isometry3d ee = chain(joints, nullptr);
    Eigen::Matrix<double, 6, 1> error;
    error.head<3>() = target.position - ee.translation();
    error.tail<3>() = orientation_error(goal, Eigen::Quaterniond(ee.linear()));
    const double pos_err = error.head<3>().norm();
    const double rot_err = error.tail<3>().norm();
    if (pos_err + rot_err < best_pos + best_rot) {
      best = joints;
      best_pos = pos_err;
      best_rot = rot_err;
    }
    if (pos_err <= kTightPosition && rot_err <= kTightOrientation) break;
    if (iter == config_.ik_max_iterations) break;

    const auto j = jacobian(joints);
    const Eigen::Matrix<double, 6, 6> jjt =
        j * j.transpose() + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
    ArmVector delta = j.transpose() * jjt.ldlt().solve(error);
    const double step = delta.cwiseAbs().maxCoeff();
    if (step > kMaxJointStep) delta *= kMaxJointStep / step;
    joints = clamp_to_limits(joints + delta);
  }

  if (best_pos > config_.ik_position_tolerance || best_rot > config_.ik_orientation_tolerance) {
    std::ostringstream msg;
    msg << "IK did not converge: position residual " << best_pos << " m, orientation residual "
        << best_rot << " rad";
    throw UnreachableTargetError(msg.str(), best_pos, best_rot);
  }
  return best;
}

Pose forward_kinematics(const SimConfig& config, const ArmVector& joints) {
  return ArmKinematics(config).forward(joints);
}

ArmVector inverse_kinematics(const SimConfig& config, const Pose& target,
                             const ArmVector& initial) {
  return ArmKinematics(config).inverse(target, initial);
}

}  // namespace hact::sim
