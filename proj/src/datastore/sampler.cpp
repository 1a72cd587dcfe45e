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

#include "hact/datastore/sampler.hpp"

#include <algorithm>
#include <stdexcept>

namespace hact::data {

Batch gather_batch(std::span<const Episode* const> episodes,
                   std::span<const std::pair<int, std::int64_t>> picks, int chunk_size) {
  if (chunk_size <= 0) throw std::invalid_argument("chunk size must be > 0");
  if (picks.empty()) throw std::invalid_argument("batch size must be > 0");
  auto episode = [&](int i) -> const Episode& {
    if (i < 0 || static_cast<std::size_t>(i) >= episodes.size()) {
      throw std::out_of_range("episode index outside dataset");
    }
    return *episodes[i];
  };
  const Episode& first = episode(picks.front().first);
  const int b = static_cast<int>(picks.size());

  Batch batch;
  batch.batch_size = b;
  batch.chunk_size = chunk_size;
  batch.images.resize(first.cameras.size());
  batch.joints.reserve(b * kJointDim);
  batch.forces.reserve(b * kForceDim);
  batch.actions.reserve(static_cast<std::size_t>(b) * chunk_size * kActionDim);
  batch.mask.reserve(static_cast<std::size_t>(b) * chunk_size);

  for (const auto& [ei, t] : picks) {
    const Episode& ep = episode(ei);
    if (t < 0 || t >= ep.length()) throw std::out_of_range("timestep outside episode");
    if (ep.cameras.size() != batch.images.size()) {
      throw ValidationError("episodes disagree on camera count");
    }
    for (std::size_t c = 0; c < ep.cameras.size(); ++c) {
      const auto frame = ep.cameras[c].frame(t);
      batch.images[c].insert(batch.images[c].end(), frame.begin(), frame.end());
    }
    const auto j = ep.joints_at(t);
    const auto f = ep.forces_at(t);
    batch.joints.insert(batch.joints.end(), j.begin(), j.end());
    batch.forces.insert(batch.forces.end(), f.begin(), f.end());
    for (int i = 0; i < chunk_size; ++i) {
      const std::int64_t src = std::min<std::int64_t>(t + i, ep.length() - 1);
      const auto a = ep.action_at(src);
      batch.actions.insert(batch.actions.end(), a.begin(), a.end());
      batch.mask.push_back(t + i < ep.length() ? 1 : 0);
    }
    batch.episode_index.push_back(ei);
    batch.timestep.push_back(t);
  }
  return batch;
}

BatchSampler::BatchSampler(std::vector<const Episode*> episodes, std::uint64_t seed)
    : episodes_(std::move(episodes)), rng_(seed) {
  if (episodes_.empty()) throw EmptyDatasetError("empty dataset: sampler has no episodes");
  for (const Episode* e : episodes_) {
    if (e->length() < 1) throw ValidationError("sampler episode has no timesteps");
  }
}

Batch BatchSampler::next(int batch_size, int chunk_size) {
  if (batch_size <= 0) throw std::invalid_argument("batch size must be > 0");
  if (chunk_size <= 0) throw std::invalid_argument("chunk size must be > 0");
  std::vector<std::pair<int, std::int64_t>> picks;
  picks.reserve(batch_size);
  std::uniform_int_distribution<int> pick_episode(0, static_cast<int>(episodes_.size()) - 1);
  for (int i = 0; i < batch_size; ++i) {
    const int e = pick_episode(rng_);
    std::uniform_int_distribution<std::int64_t> pick_t(0, episodes_[e]->length() - 1);
    picks.emplace_back(e, pick_t(rng_));
  }
  return gather_batch(episodes_, picks, chunk_size);
}

Batch sample_batch(std::span<const Episode> episodes, int batch_size, int chunk_size,
                   std::uint64_t seed) {
  std::vector<const Episode*> ptrs;
  for (const auto& e : episodes) ptrs.push_back(&e);
  return BatchSampler(std::move(ptrs), seed).next(batch_size, chunk_size);
}

}  // namespace hact::data
