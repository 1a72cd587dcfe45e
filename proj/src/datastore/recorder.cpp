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

#include "hact/datastore/recorder.hpp"

#include "hact/datastore/manifest.hpp"
#include "hact/simworld/scripted_policy.hpp"

namespace hact::data {

std::array<float, kJointDim> joint_observation(const sim::SimState& state) {
  std::array<float, kJointDim> out{};
  const auto q = state.joints();
  for (int i = 0; i < kJointDim; ++i) out[i] = static_cast<float>(q(i));
  return out;
}

std::array<float, kForceDim> force_observation(const sim::SimState& state) {
  std::array<float, kForceDim> out{};
  for (int i = 0; i < kForceDim; ++i) out[i] = static_cast<float>(state.contact_forces[i]);
  return out;
}

Episode record_scripted_episode(const sim::Simulator& sim, std::uint64_t seed, int horizon,
                                bool render) {
  const auto& cfg = sim.config();
  std::vector<std::string> names;
  if (render) {
    for (auto cam : sim::kAllCameras) names.emplace_back(sim::camera_name(cam));
  }
  EpisodeBuilder builder(names, cfg.image_height, cfg.image_width);

  sim::SimState state = sim.reset(seed);
  sim::ScriptedPolicy policy(sim, seed);
  std::vector<sim::Image> images;
  std::vector<std::span<const std::uint8_t>> frames;
  for (int t = 0; t < horizon; ++t) {
    images.clear();
    frames.clear();
    if (render) {
      for (auto cam : sim::kAllCameras) images.push_back(sim::render(sim, state, cam));
      for (const auto& im : images) frames.emplace_back(im.rgb);
    }
    const sim::Action action = policy.next_action(state);
    std::array<float, kActionDim> a{};
    for (int i = 0; i < kActionDim; ++i) a[i] = static_cast<float>(action(i));
    builder.append(frames, joint_observation(state), force_observation(state), a);
    state = sim.step(state, action);
  }
  EpisodeMetadata meta;
  meta.rate_hz = cfg.rate_hz;
  meta.source = "scripted";
  meta.seed = seed;
  meta.success = sim.in_basket(state);
  return std::move(builder).finish(meta);
}

CollectSummary collect_scripted(const sim::Simulator& sim, const std::filesystem::path& dir,
                                int episodes, std::uint64_t first_seed, int horizon,
                                int max_attempts) {
  if (episodes <= 0) throw std::invalid_argument("episode count must be > 0");
  if (max_attempts < 0) max_attempts = 2 * episodes + 10;
  std::filesystem::create_directories(dir);

  CollectSummary summary;
  summary.requested = episodes;
  std::vector<std::string> files;
  for (std::uint64_t seed = first_seed;
       static_cast<int>(files.size()) < episodes && summary.attempted < max_attempts; ++seed) {
    ++summary.attempted;
    Episode ep = record_scripted_episode(sim, seed, horizon, true);
    if (!ep.metadata.success) {
      summary.failed_seeds.push_back(seed);
      continue;
    }
    const std::string name = episode_file_name(static_cast<int>(files.size()));
    write_episode(ep, dir / name);
    files.push_back(name);
    summary.kept_seeds.push_back(seed);
  }
  if (static_cast<int>(files.size()) < episodes) {
    throw Error("collected only " + std::to_string(files.size()) + " successful episodes out of " +
                std::to_string(summary.attempted) + " attempts");
  }
  write_manifest(dir, files);
  return summary;
}

}  // namespace hact::data
