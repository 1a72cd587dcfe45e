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

#include "hact/teleop/script.hpp"

#include <algorithm>
#include <cmath>

#include "hact/simworld/scripted_policy.hpp"
#include "hact/teleop/session.hpp"

namespace hact::teleop {

std::array<double, 3> roll_pitch_yaw(const Eigen::Matrix3d& r) {
  return {std::atan2(r(2, 1), r(2, 2)), std::asin(std::clamp(-r(2, 0), -1.0, 1.0)),
          std::atan2(r(1, 0), r(0, 0))};
}

std::vector<std::string> scripted_command_log(const sim::Simulator& sim, std::uint64_t seed,
                                              double rate_hz, int ticks) {
  SessionConfig config;
  config.rate_hz = rate_hz;
  config.seed = seed;
  TeleopSession session(sim, haptics::HapticsConfig{}, config);
  sim::ScriptedPolicy policy(sim, seed);

  std::vector<std::string> lines;
  lines.push_back(to_text(ResetMsg{seed}));
  lines.push_back(to_text(RecordMsg{RecordAction::kStart}));
  const auto& limits = sim.config().hand_limits;
  for (int t = 0; t < ticks; ++t) {
    const sim::Action action = policy.next_action(session.state());
    const sim::Pose goal = sim.kinematics().forward(action.head<sim::kArmDof>());
    const sim::Pose& target = session.target();

    CmdMsg cmd;
    for (int i = 0; i < 3; ++i) {
      cmd.dpos[i] = std::clamp(goal.position(i) - target.position(i), -kMaxTranslationStep,
                               kMaxTranslationStep);
    }
    const Eigen::Matrix3d delta =
        (goal.orientation * target.orientation.conjugate()).toRotationMatrix();
    cmd.drot = roll_pitch_yaw(delta);
    for (int j = 0; j < sim::kHandDof; ++j) {
      const double span = limits[j].upper - limits[j].lower;
      cmd.closure[j] = std::clamp((action(sim::kArmDof + j) - limits[j].lower) / span, 0.0, 1.0);
    }
    session.apply(cmd);
    lines.push_back(to_text(cmd));
  }
  lines.push_back(to_text(RecordMsg{RecordAction::kStop}));
  return lines;
}

}  // namespace hact::teleop
