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
#include <span>
#include <string>
#include <vector>

#include "hact/error.hpp"

namespace hact::data {

inline constexpr int kJointDim = 13;
inline constexpr int kForceDim = 5;
inline constexpr int kActionDim = 13;
inline constexpr std::uint8_t kEpisodeFormatVersion = 1;

struct EpisodeMetadata {
  double rate_hz = 50.0;
  std::string source = "scripted";  // scripted | teleop | policy
  std::uint64_t seed = 0;
  bool success = false;

  bool operator==(const EpisodeMetadata&) const = default;
};

/// T frames of one camera, row-major [T, H, W, 3].
struct CameraStream {
  std::string name;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  std::size_t frame_bytes() const { return static_cast<std::size_t>(height) * width * 3; }
  std::span<const std::uint8_t> frame(std::int64_t t) const {
    return {pixels.data() + t * frame_bytes(), frame_bytes()};
  }
  bool operator==(const CameraStream&) const = default;
};

/// One recorded trajectory. Arrays share the leading time dimension.
struct Episode {
  std::vector<CameraStream> cameras;
  std::vector<float> joints;   // [T, 13] rad
  std::vector<float> forces;   // [T, 5] N
  std::vector<float> actions;  // [T, 13] rad
  EpisodeMetadata metadata;

  std::int64_t length() const { return static_cast<std::int64_t>(joints.size() / kJointDim); }

  std::span<const float> joints_at(std::int64_t t) const {
    return {joints.data() + t * kJointDim, kJointDim};
  }
  std::span<const float> forces_at(std::int64_t t) const {
    return {forces.data() + t * kForceDim, kForceDim};
  }
  std::span<const float> action_at(std::int64_t t) const {
    return {actions.data() + t * kActionDim, kActionDim};
  }
  const CameraStream& camera(std::string_view name) const;

  // Throws ValidationError naming the first offending array.
  void validate() const;

  bool operator==(const Episode&) const = default;
};

/// Appends timesteps to an Episode under construction.
class EpisodeBuilder {
 public:
  EpisodeBuilder(std::vector<std::string> camera_names, int height, int width);

  void append(std::span<const std::span<const std::uint8_t>> frames,
              std::span<const float> joints, std::span<const float> forces,
              std::span<const float> action);

  std::int64_t length() const { return episode_.length(); }
  Episode finish(EpisodeMetadata metadata) &&;

 private:
  Episode episode_;
};

// episode_NNNN.hax:
//   "HAXE" | u8 version | u32 LE header length | JSON header | arrays
// Arrays follow the header's "arrays" order, little-endian, row-major.
void write_episode(const Episode& episode, const std::filesystem::path& path);
Episode read_episode(const std::filesystem::path& path);

// Parses and size-checks a file without loading pixel data into an Episode.
struct EpisodeFileInfo {
  std::int64_t length = 0;
  std::vector<std::string> cameras;
  int height = 0;
  int width = 0;
  EpisodeMetadata metadata;
};
EpisodeFileInfo inspect_episode(const std::filesystem::path& path);

std::string episode_file_name(int index);

}  // namespace hact::data
