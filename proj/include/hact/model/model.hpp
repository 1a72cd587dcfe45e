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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "hact/error.hpp"

namespace hact::model {

inline constexpr int kJointDim = 13;
inline constexpr int kForceDim = 5;
inline constexpr int kActionDim = 13;

// Forces were required by the configuration but not supplied (or the reverse
// for camera images).
class InputArityError : public Error {
 public:
  using Error::Error;
};

// Every entry of a chunk was masked out, so there is nothing to fit.
class DegenerateChunkError : public Error {
 public:
  using Error::Error;
};

struct ModelConfig {
  int chunk_size = 20;
  int latent_dim = 32;
  int hidden_dim = 256;
  int num_heads = 4;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int feedforward_dim = 1024;
  std::vector<int> backbone_channels = {32, 64, 128, 128};
  int image_height = 64;
  int image_width = 64;
  bool use_haptics = true;
  std::vector<std::string> cameras = {"front", "wrist"};

  // Throws ConfigError.
  void validate() const;
  // Side length of the conv feature grid along one image axis.
  int grid_height() const;
  int grid_width() const;

  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

// One batch of network inputs. Images are [B,3,H,W] in [0,1] per camera in
// config order; joints and forces are already normalized.
struct Observation {
  std::vector<torch::Tensor> images;
  torch::Tensor joints;                 // [B,13]
  std::optional<torch::Tensor> forces;  // [B,5]

  std::int64_t batch_size() const { return joints.size(0); }
};

struct LatentStyle {
  torch::Tensor mu;      // [B,D]
  torch::Tensor logvar;  // [B,D]
};

struct LossBreakdown {
  torch::Tensor mse;
  torch::Tensor kl;
  torch::Tensor total;
};

// Closed-form KL(N(mu, exp(logvar)) || N(0, I)), summed over the latent
// dimension and averaged over the batch.
torch::Tensor kl_divergence(const torch::Tensor& mu, const torch::Tensor& logvar);

// pred, truth [B,k,13]; mask [B,k] with 1 for valid steps.
// Throws DegenerateChunkError if the mask has no valid entry.
LossBreakdown act_loss(const torch::Tensor& pred, const torch::Tensor& truth,
                       const torch::Tensor& mask, const LatentStyle& style, double beta);

class ImageBackboneImpl : public torch::nn::Module {
 public:
  ImageBackboneImpl(const std::vector<int>& channels, int out_dim);
  // [B,3,H,W] -> [B, tokens, out_dim]
  torch::Tensor forward(const torch::Tensor& images);

 private:
  torch::nn::Sequential convs_{nullptr};
  torch::nn::Conv2d project_{nullptr};
};
TORCH_MODULE(ImageBackbone);

class HapticActImpl : public torch::nn::Module {
 public:
  explicit HapticActImpl(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  // CVAE encoder over low-dimensional inputs and the action chunk.
  // actions [B,k,13] normalized; mask [B,k].
  LatentStyle encode_style(const Observation& obs, const torch::Tensor& actions,
                           const torch::Tensor& mask);

  // [B,D] latent -> [B,k,13] normalized actions.
  torch::Tensor decode_actions(const Observation& obs, const torch::Tensor& z);

  struct TrainOutput {
    torch::Tensor pred;
    LatentStyle style;
  };
  // z = mu + sigma * eps with caller-provided eps [B,D].
  TrainOutput forward_train(const Observation& obs, const torch::Tensor& actions,
                            const torch::Tensor& mask, const torch::Tensor& eps);

  // Decode with z = 0.
  torch::Tensor infer(const Observation& obs);

 private:
  void check_observation(const Observation& obs) const;
  torch::Tensor low_dim_tokens(const Observation& obs, bool style_branch);

  ModelConfig config_;
  std::vector<ImageBackbone> backbones_;
  std::vector<torch::Tensor> image_pos_;
  torch::nn::Linear joint_proj_{nullptr};
  torch::nn::Linear force_proj_{nullptr};
  torch::nn::Linear style_joint_proj_{nullptr};
  torch::nn::Linear style_force_proj_{nullptr};
  torch::nn::Linear action_proj_{nullptr};
  torch::nn::Linear latent_proj_{nullptr};
  torch::nn::Linear latent_head_{nullptr};
  torch::Tensor cls_token_;
  torch::Tensor style_pos_;
  torch::Tensor memory_pos_;
  torch::Tensor queries_;
  torch::nn::TransformerEncoder style_encoder_{nullptr};
  torch::nn::TransformerEncoder memory_encoder_{nullptr};
  torch::nn::TransformerDecoder decoder_{nullptr};
  torch::nn::Linear action_head_{nullptr};
};
TORCH_MODULE(HapticAct);

// Named parameters and buffers in registration order.
std::vector<std::pair<std::string, torch::Tensor>> named_weights(HapticAct& model);

}  // namespace hact::model
