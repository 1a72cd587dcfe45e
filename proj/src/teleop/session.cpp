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

#include "hact/teleop/session.hpp"

#include <cmath>

#include "hact/datastore/manifest.hpp"
#include "hact/datastore/recorder.hpp"
#include "hact/teleop/image_codec.hpp"

namespace hact::teleop {

namespace fs = std::filesystem;

std::vector<int> substep_schedule(double sim_rate_hz, double rate_hz, std::int64_t count) {
  if (!(sim_rate_hz > 0.0) || !(rate_hz > 0.0)) throw std::invalid_argument("rates must be > 0");
  std::vector<int> out;
  double acc = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    acc += sim_rate_hz / rate_hz;
    const int n = static_cast<int>(std::floor(acc));
    acc -= n;
    out.push_back(n);
  }
  return out;
}

namespace {

std::vector<std::span<const std::uint8_t>> views(const std::vector<sim::Image>& images) {
  std::vector<std::span<const std::uint8_t>> out;
  for (const auto& im : images) out.emplace_back(im.rgb);
  return out;
}

sim::Action action_of(const sim::ArmVector& arm, const sim::HandVector& hand) {
  sim::Action a;
  a << arm, hand;
  return a;
}

}  // namespace

TeleopSession::TeleopSession(const sim::Simulator& sim, haptics::HapticsConfig haptics,
                             SessionConfig config)
    : sim_(&sim), haptics_(std::move(haptics)), config_(std::move(config)) {
  if (!(config_.rate_hz > 0.0)) throw ConfigError("teleop rate must be > 0");
  haptics_.duty.validate();
  for (auto cam : sim::kAllCameras) cameras_.push_back(cam);
  if (!config_.out_dir.empty() && fs::exists(config_.out_dir / "dataset.json")) {
    files_ = data::load_manifest(config_.out_dir).files;
  }
  reset(config_.seed);
}

StateMsg TeleopSession::reset(std::uint64_t seed) {
  builder_.reset();
  config_.seed = seed;
  state_ = sim_->reset(seed);
  target_ = sim_->kinematics().forward(state_.arm);
  hand_target_ = state_.hand;
  substep_accumulator_ = 0.0;
  frame_cache_.reset();
  return state_message();
}

const std::vector<sim::Image>& TeleopSession::frames() {
  if (!frame_cache_) {
    std::vector<sim::Image> images;
    for (auto cam : cameras_) images.push_back(sim::render(*sim_, state_, cam));
    frame_cache_ = std::move(images);
  }
  return *frame_cache_;
}

StateMsg TeleopSession::apply(const CmdMsg& cmd) {
  sim::Pose next = target_;
  next.position += Eigen::Vector3d(cmd.dpos[0], cmd.dpos[1], cmd.dpos[2]);
  const Eigen::Quaterniond delta = Eigen::AngleAxisd(cmd.drot[2], Eigen::Vector3d::UnitZ()) *
                                   Eigen::AngleAxisd(cmd.drot[1], Eigen::Vector3d::UnitY()) *
                                   Eigen::AngleAxisd(cmd.drot[0], Eigen::Vector3d::UnitX());
  next.orientation = (delta * next.orientation).normalized();

  sim::ArmVector arm;
  try {
    arm = sim_->kinematics().inverse(next, state_.arm);
  } catch (const sim::UnreachableTargetError& e) {
    throw ProtocolError(std::string("pose target unreachable: ") + e.what());
  }
  const auto& limits = sim_->config().hand_limits;
  for (int j = 0; j < sim::kHandDof; ++j) {
    hand_target_(j) = limits[j].lower + cmd.closure[j] * (limits[j].upper - limits[j].lower);
  }
  target_ = next;
  // Step with the float32 targets that get recorded so a replay is exact.
  sim::Action action = action_of(arm, hand_target_);
  for (auto& v : action) v = static_cast<double>(static_cast<float>(v));

  if (builder_) {
    std::array<float, data::kActionDim> a{};
    for (int i = 0; i < data::kActionDim; ++i) a[i] = static_cast<float>(action(i));
    const auto& images = frames();
    builder_->append(views(images), data::joint_observation(state_), data::force_observation(state_), a);
  }

  substep_accumulator_ += sim_->config().rate_hz / config_.rate_hz;
  const int n = static_cast<int>(std::floor(substep_accumulator_));
  substep_accumulator_ -= n;
  for (int i = 0; i < n; ++i) state_ = sim_->step(state_, action);
  frame_cache_.reset();
  return state_message();
}

nlohmann::json TeleopSession::record(RecordAction action) {
  switch (action) {
    case RecordAction::kStart: {
      if (builder_) throw ProtocolError("already recording");
      const auto& cfg = sim_->config();
      std::vector<std::string> names;
      for (auto cam : cameras_) names.emplace_back(sim::camera_name(cam));
      // Replay starts from a reset, so every recording does too.
      reset(config_.seed);
      builder_.emplace(names, cfg.image_height, cfg.image_width);
      return {{"type", "record"}, {"status", "started"}, {"episode_id", saved_episodes()}};
    }
    case RecordAction::kDiscard: {
      if (!builder_) throw ProtocolError("not recording");
      builder_.reset();
      return {{"type", "record"}, {"status", "discarded"}};
    }
    case RecordAction::kStop: {
      if (!builder_) throw ProtocolError("not recording");
      if (builder_->length() == 0) {
        builder_.reset();
        throw ProtocolError("recording has no steps; discarded");
      }
      if (config_.out_dir.empty()) throw ProtocolError("server has no output directory");
      data::EpisodeMetadata meta;
      meta.rate_hz = config_.rate_hz;
      meta.source = "teleop";
      meta.seed = config_.seed;
      meta.success = sim_->in_basket(state_);
      data::Episode ep = std::move(*builder_).finish(meta);
      builder_.reset();
      fs::create_directories(config_.out_dir);
      const int id = saved_episodes();
      const std::string file = data::episode_file_name(id);
      data::write_episode(ep, config_.out_dir / file);
      files_.push_back(file);
      data::write_manifest(config_.out_dir, files_);
      return {{"type", "record"},
              {"status", "saved"},
              {"episode_id", id},
              {"file", file},
              {"steps", ep.length()},
              {"success", meta.success}};
    }
  }
  throw ProtocolError("unknown record action");
}

void TeleopSession::abandon_recording() { builder_.reset(); }

StateMsg TeleopSession::state_message() {
  StateMsg s;
  s.step = state_.step;
  const auto& images = frames();
  for (std::size_t c = 0; c < cameras_.size(); ++c) {
    s.frames.emplace_back(std::string(sim::camera_name(cameras_[c])), base64_encode(encode_png(images[c])));
  }
  const auto q = state_.joints();
  for (int i = 0; i < sim::kJointDof; ++i) s.joints[i] = q(i);
  for (int i = 0; i < 5; ++i) {
    s.forces[i] = state_.contact_forces[i];
    s.duty[i] = haptics::force_to_duty(haptics_.duty, s.forces[i]);
  }
  s.recording = recording();
  if (s.recording) s.episode_id = saved_episodes();
  return s;
}

data::Episode replay_teleop_episode(const sim::Simulator& sim, const data::Episode& recorded) {
  std::vector<std::string> names;
  std::vector<sim::Camera> cameras;
  for (const auto& c : recorded.cameras) {
    names.push_back(c.name);
    cameras.push_back(sim::parse_camera(c.name));
  }
  const auto& cfg = sim.config();
  data::EpisodeBuilder builder(names, cfg.image_height, cfg.image_width);
  sim::SimState state = sim.reset(recorded.metadata.seed);
  const auto schedule = substep_schedule(cfg.rate_hz, recorded.metadata.rate_hz, recorded.length());
  for (std::int64_t t = 0; t < recorded.length(); ++t) {
    std::vector<sim::Image> images;
    for (auto cam : cameras) images.push_back(sim::render(sim, state, cam));
    const auto a = recorded.action_at(t);
    builder.append(views(images), data::joint_observation(state), data::force_observation(state), a);
    sim::Action action;
    for (int i = 0; i < data::kActionDim; ++i) action(i) = a[i];
    for (int i = 0; i < schedule[t]; ++i) state = sim.step(state, action);
  }
  data::EpisodeMetadata meta = recorded.metadata;
  meta.success = sim.in_basket(state);
  return std::move(builder).finish(meta);
}

}  // namespace hact::teleop
