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
#include <filesystem>
#include <vector>

#include "hact/datastore/episode.hpp"
#include "hact/model/checkpoint.hpp"
#include "hact/simworld/render.hpp"
#include "hact/simworld/sim.hpp"

namespace hact::eval {

// Simulator failure during a rollout, tagged with the step it happened at.
class RolloutError : public Error {
 public:
  RolloutError(std::int64_t step, const std::string& what)
      : Error("rollout step " + std::to_string(step) + ": " + what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

struct RolloutConfig {
  int horizon = 400;
  // Blend every chunk that covers the current step with weights exp(-alpha*i),
  // i = 0 for the oldest. Decodes at every step when enabled.
  bool temporal_aggregation = false;
  double aggregation_alpha = 0.01;
};

// A trained checkpoint wrapped for closed-loop use.
class Policy {
 public:
  explicit Policy(model::Checkpoint checkpoint);
  static Policy load(const std::filesystem::path& path);

  const model::ModelConfig& config() const { return ck_.config; }
  std::int64_t decode_calls() const { return decode_calls_; }

  // k joint-target rows in radians for the given raw observation.
  std::vector<sim::Action> decode(const std::vector<sim::Image>& frames,
                                  std::span<const float> joints, std::span<const float> forces);

 private:
  model::Checkpoint ck_;
  std::vector<sim::Camera> cameras_;
  std::int64_t decode_calls_ = 0;
};

struct RolloutResult {
  data::Episode episode;
  bool success = false;
  std::uint64_t seed = 0;
  std::int64_t decode_calls = 0;
  std::vector<double> mean_force;                               // [T]
  std::array<std::vector<double>, data::kForceDim> finger_forces;  // 5 x [T]
};

RolloutResult rollout(Policy& policy, const sim::Simulator& sim, std::uint64_t seed,
                      const RolloutConfig& config = {});

}  // namespace hact::eval
