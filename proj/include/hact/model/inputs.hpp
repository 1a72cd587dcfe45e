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
#include <span>
#include <vector>

#include <torch/torch.h>

#include "hact/datastore/norm_stats.hpp"
#include "hact/datastore/sampler.hpp"
#include "hact/model/model.hpp"

namespace hact::model {

// Batch images are taken in episode camera order, which must match
// config.cameras. Forces are attached only when the config uses haptics.
Observation observation_from_batch(const data::Batch& batch, const data::NormStats& stats,
                                   const ModelConfig& config);

// [B,k,13] normalized action targets and the [B,k] validity mask.
torch::Tensor actions_from_batch(const data::Batch& batch, const data::NormStats& stats);
torch::Tensor mask_from_batch(const data::Batch& batch);

// Single observation (B = 1) from raw frames [H,W,3], joints and forces.
Observation observation_from_raw(std::span<const std::span<const std::uint8_t>> frames,
                                 std::span<const float> joints, std::span<const float> forces,
                                 const data::NormStats& stats, const ModelConfig& config);

// [k,13] normalized network output back to joint targets.
std::vector<std::vector<double>> denormalize_chunk(const torch::Tensor& chunk,
                                                   const data::NormStats& stats);

}  // namespace hact::model
