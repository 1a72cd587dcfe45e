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
#include <span>
#include <string>
#include <vector>

#include "hact/datastore/episode.hpp"

namespace hact::eval {

inline constexpr int kHandJoints = 6;
inline constexpr std::array<const char*, kHandJoints> kHandJointNames = {
    "thumb_yaw", "thumb_pitch", "index", "middle", "ring", "pinky"};
inline constexpr std::array<const char*, data::kForceDim> kFingerNames = {
    "thumb", "index", "middle", "ring", "pinky"};

// Tukey box: quartiles by linear interpolation between order statistics,
// whiskers at the most extreme samples within 1.5 IQR of the box.
struct BoxStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> samples);

// Grasp phase: steps where at least one fingertip force is nonzero.
struct ForceMetrics {
  std::vector<double> mean_curve;  // per step, finger mean averaged over episodes
  std::array<BoxStats, data::kForceDim> fingers;
  double grasp_mean = 0.0;  // over every finger sample inside the grasp phase
  std::size_t grasp_steps = 0;
};

// Throws EmptyDatasetError for no episodes.
ForceMetrics force_metrics(std::span<const data::Episode* const> episodes);
ForceMetrics force_metrics(std::span<const data::Episode> episodes);

struct JointTrace {
  std::int64_t length = 0;
  std::array<std::vector<double>, kHandJoints> policy;
  std::array<std::vector<double>, kHandJoints> demo;
  std::array<double, kHandJoints> rms{};
};

// Hand-joint positions of both episodes truncated to the shorter one.
JointTrace joint_trace_compare(const data::Episode& policy, const data::Episode& demo);

}  // namespace hact::eval
