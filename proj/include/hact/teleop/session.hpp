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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hact/datastore/episode.hpp"
#include "hact/haptics.hpp"
#include "hact/simworld/kinematics.hpp"
#include "hact/simworld/render.hpp"
#include "hact/simworld/sim.hpp"
#include "hact/teleop/protocol.hpp"

namespace hact::teleop {

struct SessionConfig {
  double rate_hz = 15.0;  // emitted states and recorded rows per second
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
};

// Number of simulator steps to run before each of `count` emitted states.
// Uses a fractional accumulator, so 50 Hz over 15 Hz gives 3, 3, 4, ...
std::vector<int> substep_schedule(double sim_rate_hz, double rate_hz, std::int64_t count);

// Simulator side of one teleoperation session. Owned and driven by a single
// thread; the server feeds it parsed client messages in arrival order.
class TeleopSession {
 public:
  TeleopSession(const sim::Simulator& sim, haptics::HapticsConfig haptics, SessionConfig config);

  StateMsg reset(std::uint64_t seed);

  // Moves the pose target by the deltas, solves IK, maps closure onto the
  // hand joints and runs one emission period of simulator steps. Throws
  // ProtocolError if the new target cannot be reached; nothing moves then.
  StateMsg apply(const CmdMsg& cmd);

  // Returns the acknowledgement frame. Throws ProtocolError for a stop or
  // discard without an active recording.
  nlohmann::json record(RecordAction action);

  // Drops any recording in progress (client went away).
  void abandon_recording();

  StateMsg state_message();
  const sim::SimState& state() const { return state_; }
  const sim::Pose& target() const { return target_; }
  double rate_hz() const { return config_.rate_hz; }
  bool recording() const { return builder_.has_value(); }
  int saved_episodes() const { return static_cast<int>(files_.size()); }
  const std::vector<std::string>& files() const { return files_; }

 private:
  const std::vector<sim::Image>& frames();

  const sim::Simulator* sim_;
  haptics::HapticsConfig haptics_;
  SessionConfig config_;
  std::vector<sim::Camera> cameras_;
  sim::SimState state_;
  sim::Pose target_;
  sim::HandVector hand_target_ = sim::HandVector::Zero();
  double substep_accumulator_ = 0.0;
  std::optional<std::vector<sim::Image>> frame_cache_;
  std::optional<data::EpisodeBuilder> builder_;
  std::vector<std::string> files_;
};

// Re-executes a recorded teleop episode's actions from its seed with the same
// substep schedule. Cameras are rendered when the episode carries them.
data::Episode replay_teleop_episode(const sim::Simulator& sim, const data::Episode& recorded);

}  // namespace hact::teleop
