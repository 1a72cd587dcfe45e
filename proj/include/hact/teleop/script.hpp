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
#include <string>
#include <vector>

#include "hact/simworld/sim.hpp"
#include "hact/teleop/protocol.hpp"

namespace hact::teleop {

// Produces a teleop command log (one JSON message per line) that picks and
// places the block for `seed`: reset, record start, `ticks` jog commands
// derived from the scripted policy in closed loop, record stop.
std::vector<std::string> scripted_command_log(const sim::Simulator& sim, std::uint64_t seed,
                                              double rate_hz, int ticks);

// Roll, pitch, yaw of a world-frame rotation R = Rz(yaw) Ry(pitch) Rx(roll).
std::array<double, 3> roll_pitch_yaw(const Eigen::Matrix3d& rotation);

}  // namespace hact::teleop
