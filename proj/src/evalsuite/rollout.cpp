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

#include "hact/evalsuite/rollout.hpp"

#include <cmath>
#include <deque>

#include "hact/datastore/recorder.hpp"
#include "hact/model/inputs.hpp"

namespace hact::eval {

Policy::Policy(model::Checkpoint checkpoint) : ck_(std::move(checkpoint)) {
  if (!ck_.model) throw ConfigError("checkpoint has no model");
  for (const auto& name : ck_.config.cameras) cameras_.push_back(sim::parse_camera(name));
  ck_.model->eval();
}

Policy Policy::load(const std::filesystem::path& path) { return Policy(model::load_checkpoint(path)); }

std::vector<sim::Action> Policy::decode(const std::vector<sim::Image>& frames,
                                        std::span<const float> joints, std::span<const float> forces) {
  std::vector<std::span<const std::uint8_t>> views;
  for (const auto& f : frames) views.emplace_back(f.rgb);
  torch::NoGradGuard no_grad;
  const auto obs = model::observation_from_raw(views, joints, forces, ck_.stats, ck_.config);
  const auto rows = model::denormalize_chunk(ck_.model->infer(obs)[0], ck_.stats);
  ++decode_calls_;
  std::vector<sim::Action> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(Eigen::Map<const sim::Action>(r.data()));
  return out;
}

RolloutResult rollout(Policy& policy, const sim::Simulator& sim, std::uint64_t seed,
                      const RolloutConfig& config) {
  const auto& mc = policy.config();
  if (mc.image_height != sim.config().image_height || mc.image_width != sim.config().image_width) {
    throw ConfigError("model image size does not match the simulator renderer");
  }
  if (config.horizon <= 0) throw std::invalid_argument("horizon must be > 0");
  std::vector<sim::Camera> cameras;
  for (const auto& name : mc.cameras) cameras.push_back(sim::parse_camera(name));

  RolloutResult result;
  result.seed = seed;
  const std::int64_t calls_before = policy.decode_calls();
  data::EpisodeBuilder builder(mc.cameras, mc.image_height, mc.image_width);
  sim::SimState state = sim.reset(seed);

  std::vector<sim::Action> plan;
  // (first step covered, chunk) for temporal aggregation
  std::deque<std::pair<int, std::vector<sim::Action>>> chunks;
  const int k = mc.chunk_size;

  for (int t = 0; t < config.horizon; ++t) {
    std::vector<sim::Image> frames;
    for (auto cam : cameras) frames.push_back(sim::render(sim, state, cam));
    const auto joints = data::joint_observation(state);
    const auto forces = data::force_observation(state);

    sim::Action action;
    if (config.temporal_aggregation) {
      chunks.emplace_back(t, policy.decode(frames, joints, forces));
      while (!chunks.empty() && chunks.front().first + k <= t) chunks.pop_front();
      sim::Action sum = sim::Action::Zero();
      double wsum = 0.0;
      int i = 0;
      for (const auto& [start, chunk] : chunks) {
        const double w = std::exp(-config.aggregation_alpha * i++);
        sum += w * chunk[t - start];
        wsum += w;
      }
      action = sum / wsum;
    } else {
      if (t % k == 0) plan = policy.decode(frames, joints, forces);
      action = plan[t % k];
    }

    std::array<float, data::kActionDim> a{};
    for (int i = 0; i < data::kActionDim; ++i) a[i] = static_cast<float>(action(i));
    std::vector<std::span<const std::uint8_t>> views;
    for (const auto& f : frames) views.emplace_back(f.rgb);
    builder.append(views, joints, forces, a);

    double mean = 0.0;
    for (int f = 0; f < data::kForceDim; ++f) {
      result.finger_forces[f].push_back(forces[f]);
      mean += forces[f];
    }
    result.mean_force.push_back(mean / data::kForceDim);

    try {
      state = sim.step(state, action);
    } catch (const Error& e) {
      throw RolloutError(t, e.what());
    }
  }
  result.success = sim.in_basket(state);
  result.decode_calls = policy.decode_calls() - calls_before;
  result.episode = std::move(builder).finish({sim.config().rate_hz, "policy", seed, result.success});
  return result;
}

}  // namespace hact::eval
