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
#include <string_view>
#include <vector>

#include "hact/simworld/sim.hpp"

namespace hact::sim {

enum class Camera : int { kFront = 0, kWrist = 1 };

inline constexpr std::array<Camera, 2> kAllCameras = {Camera::kFront, Camera::kWrist};

std::string_view camera_name(Camera camera);
Camera parse_camera(std::string_view name);

/// Row-major H x W x 3 uint8 frame.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;

  bool operator==(const Image&) const = default;
};

/// Ray-cast renderer: table, basket, block, arm links as capsules, palm box
/// and fingers. Pure function of (config, state, camera).
Image render(const Simulator& sim, const SimState& state, Camera camera);

}  // namespace hact::sim
