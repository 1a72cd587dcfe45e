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
#include <optional>
#include <string>

#include <json.hpp>

#include "hact/datastore/norm_stats.hpp"
#include "hact/model/model.hpp"

namespace hact::model {

inline constexpr std::uint8_t kCheckpointFormatVersion = 1;

// Checkpoint written by a different format version or for a different model
// configuration than the caller requires.
class IncompatibleCheckpointError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Everything needed to continue an optimization run exactly.
struct TrainerState {
  std::int64_t step = 0;
  double best_validation = 0.0;
  std::int64_t best_step = -1;
  nlohmann::json train_config;
  std::string optimizer;  // serialized optimizer state
  std::vector<std::string> train_files;
  std::vector<std::string> validation_files;
};

struct Checkpoint {
  ModelConfig config;
  data::NormStats stats;
  HapticAct model{nullptr};
  std::optional<TrainerState> trainer;
};

// "HAXC", version byte, u32 LE header length, JSON header, then raw
// little-endian arrays in header order. Written via a temporary file and
// renamed into place.
void save_checkpoint(const std::filesystem::path& path, HapticAct& model,
                     const data::NormStats& stats, const TrainerState* trainer = nullptr);

// Throws IncompatibleCheckpointError on a version mismatch and
// ValidationError on a damaged file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hact::model
