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
#include <random>
#include <span>
#include <vector>

#include "hact/datastore/episode.hpp"

namespace hact::data {

/// B observations with their k-step action chunks. Chunks that run past the
/// episode end repeat the final action and are marked invalid in `mask`.
struct Batch {
  int batch_size = 0;
  int chunk_size = 0;
  std::vector<std::vector<std::uint8_t>> images;  // per camera, [B, H, W, 3]
  std::vector<float> joints;                      // [B, 13]
  std::vector<float> forces;                      // [B, 5]
  std::vector<float> actions;                     // [B, k, 13]
  std::vector<std::uint8_t> mask;                 // [B, k], 1 = valid
  std::vector<int> episode_index;                 // [B]
  std::vector<std::int64_t> timestep;             // [B]
};

/// Uniform episode, then uniform timestep within it.
class BatchSampler {
 public:
  // Throws EmptyDatasetError if `episodes` is empty.
  BatchSampler(std::vector<const Episode*> episodes, std::uint64_t seed);

  // Throws std::invalid_argument if batch_size or chunk_size <= 0.
  Batch next(int batch_size, int chunk_size);

 private:
  std::vector<const Episode*> episodes_;
  std::mt19937_64 rng_;
};

Batch sample_batch(std::span<const Episode> episodes, int batch_size, int chunk_size,
                   std::uint64_t seed);

// Observation at t and the chunk starting at t, for a fixed list of picks.
Batch gather_batch(std::span<const Episode* const> episodes,
                   std::span<const std::pair<int, std::int64_t>> picks, int chunk_size);

}  // namespace hact::data
