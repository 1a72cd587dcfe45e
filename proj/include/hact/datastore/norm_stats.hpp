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

#include <span>
#include <vector>

#include <json.hpp>

#include "hact/datastore/episode.hpp"

namespace hact::data {

inline constexpr double kStdFloor = 1e-8;

/// Per-dimension mean and population standard deviation.
struct Moments {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t size() const { return mean.size(); }
  bool operator==(const Moments&) const = default;
};

struct NormStats {
  Moments joints;
  Moments forces;
  Moments actions;

  bool operator==(const NormStats&) const = default;
};

// Throws EmptyDatasetError on no episodes or no timesteps.
NormStats compute_norm_stats(std::span<const Episode> episodes);
NormStats compute_norm_stats(std::span<const Episode* const> episodes);

// (x - mean) / std and its inverse. Throws std::invalid_argument on
// dimension mismatch.
std::vector<double> normalize(std::span<const double> x, const Moments& moments);
std::vector<double> denormalize(std::span<const double> x, const Moments& moments);
std::vector<double> normalize(std::span<const float> x, const Moments& moments);

nlohmann::json to_json(const NormStats& stats);
NormStats norm_stats_from_json(const nlohmann::json& j);

}  // namespace hact::data
