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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "hact/datastore/episode.hpp"
#include "hact/datastore/norm_stats.hpp"
#include "hact/datastore/sampler.hpp"
#include "hact/model/checkpoint.hpp"
#include "hact/model/model.hpp"

namespace hact::train {

// Raised when the loss stops being finite. The message names the step and the
// checkpoint holding the last finite weights.
class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

struct TrainConfig {
  int steps = 5000;
  int batch_size = 8;
  double learning_rate = 1e-4;
  double beta = 10.0;
  std::uint64_t seed = 0;
  int checkpoint_interval = 1000;
  int log_interval = 100;
  double validation_fraction = 0.1;
  double grad_clip = 1.0;
  int validation_batches = 4;
  int validation_batch_size = 32;
  // "constant" or "cosine" (decays to zero at `steps`).
  std::string lr_schedule = "cosine";

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

// Learning rate for the optimizer step that follows `completed` steps.
double scheduled_learning_rate(const TrainConfig& c, std::int64_t completed);

// train_config.json holds {"model": ModelConfig, "train": TrainConfig}.
struct RunConfig {
  model::ModelConfig model;
  TrainConfig train;
};
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

struct TrainRecord {
  std::int64_t step = 0;
  double train_mse = 0.0;
  double train_kl = 0.0;
  double train_total = 0.0;
  std::optional<double> val_mse;
  double wall_time = 0.0;
};

nlohmann::json to_json(const TrainRecord& r);

struct StepLoss {
  double mse = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

// Labeled episode, the file name doubles as a stable id for the split.
struct NamedEpisode {
  std::string name;
  data::Episode episode;
};

std::vector<NamedEpisode> load_named_episodes(const std::filesystem::path& dataset_dir);

// Whole-episode split, shuffled by seed. With too few episodes for a
// validation share the validation list is empty.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};
Split split_episodes(std::size_t count, double validation_fraction, std::uint64_t seed);

// Seed for everything drawn at `step`; keeps runs resumable at any step.
std::uint64_t step_seed(std::uint64_t seed, std::int64_t step);

class Trainer {
 public:
  // Fresh run. Throws EmptyDatasetError for an empty episode list and
  // ConfigError if the episodes disagree with the model's cameras or image size.
  Trainer(model::ModelConfig model_config, TrainConfig train_config,
          std::vector<NamedEpisode> episodes, std::filesystem::path out_dir);

  // Continue from a checkpoint that carries trainer state. The requested
  // model config must equal the stored one (IncompatibleCheckpointError).
  static Trainer resume(const std::filesystem::path& checkpoint,
                        const model::ModelConfig& model_config, TrainConfig train_config,
                        std::vector<NamedEpisode> episodes, std::filesystem::path out_dir);

  Trainer(Trainer&&) noexcept;
  Trainer& operator=(Trainer&&) noexcept;
  ~Trainer();

  // Runs until the configured total step count. Appends one JSON line per
  // record to out_dir/train_log.jsonl and calls `on_record` if given.
  std::vector<TrainRecord> run(const std::function<void(const TrainRecord&)>& on_record = {});

  // One optimizer step on the batch for the next step index.
  StepLoss step();
  // Optimizer step on an explicit batch; exposed for tests.
  StepLoss step_on(const data::Batch& batch, std::uint64_t eps_seed);

  // Masked MSE at z = 0 over the fixed validation batches.
  double validation_mse();

  void save(const std::filesystem::path& path);

  std::int64_t current_step() const;
  model::HapticAct& model();
  const data::NormStats& stats() const;
  const model::ModelConfig& model_config() const;
  const TrainConfig& train_config() const;
  const std::filesystem::path& out_dir() const;

 private:
  struct State;
  explicit Trainer(std::unique_ptr<State> state);
  std::unique_ptr<State> s_;
};

// z = 0 masked MSE over every start index of every episode, in normalized units.
double dataset_mse(model::HapticAct& model, std::span<const data::Episode* const> episodes,
                   const data::NormStats& stats, int batch_size = 32);

}  // namespace hact::train
