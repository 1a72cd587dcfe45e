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
#include <functional>
#include <vector>

#include "hact/datastore/episode.hpp"
#include "hact/simworld/render.hpp"
#include "hact/simworld/sim.hpp"

namespace hact::data {

inline constexpr int kDefaultHorizon = 400;

// Observation arrays of a simulator state, in episode layout.
std::array<float, kJointDim> joint_observation(const sim::SimState& state);
std::array<float, kForceDim> force_observation(const sim::SimState& state);

/// Runs the scripted policy for `horizon` steps from reset(seed). With
/// `render` false the returned episode has no cameras (used for cheap
/// success sweeps).
Episode record_scripted_episode(const sim::Simulator& sim, std::uint64_t seed,
                                int horizon = kDefaultHorizon, bool render = true);

struct CollectSummary {
  int requested = 0;
  int attempted = 0;
  std::vector<std::uint64_t> kept_seeds;
  std::vector<std::uint64_t> failed_seeds;
};

/// Records successful scripted episodes from seeds first_seed, first_seed+1,
/// ... until `episodes` are kept or `max_attempts` seeds were tried, writing
/// episode_NNNN.hax files and dataset.json into `dir`.
CollectSummary collect_scripted(const sim::Simulator& sim, const std::filesystem::path& dir,
                                int episodes, std::uint64_t first_seed, int horizon = kDefaultHorizon,
                                int max_attempts = -1);

}  // namespace hact::data
