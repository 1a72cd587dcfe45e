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

#include "hact/model/model.hpp"

#include <cmath>

namespace hact::model {

namespace nn = torch::nn;

namespace {

int conv_out(int size) { return (size - 1) / 2 + 1; }  // k=3, s=2, p=1

nn::TransformerEncoder make_encoder(const ModelConfig& c, int layers) {
  nn::TransformerEncoderLayerOptions opts(c.hidden_dim, c.num_heads);
  opts.dim_feedforward(c.feedforward_dim).dropout(0.0);
  return nn::TransformerEncoder(nn::TransformerEncoderOptions(nn::TransformerEncoderLayer(opts), layers));
}

}  // namespace

void ModelConfig::validate() const {
  if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
  if (latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
  if (hidden_dim < 1 || num_heads < 1 || hidden_dim % num_heads != 0) {
    throw ConfigError("hidden_dim must be a positive multiple of num_heads");
  }
  if (encoder_layers < 1 || decoder_layers < 1) throw ConfigError("layer counts must be >= 1");
  if (feedforward_dim < 1) throw ConfigError("feedforward_dim must be >= 1");
  if (backbone_channels.empty()) throw ConfigError("backbone_channels must not be empty");
  for (int ch : backbone_channels) {
    if (ch < 1) throw ConfigError("backbone channel counts must be >= 1");
  }
  if (image_height < 1 || image_width < 1) throw ConfigError("image size must be positive");
  if (cameras.empty()) throw ConfigError("at least one camera is required");
}

int ModelConfig::grid_height() const {
  int h = image_height;
  for (std::size_t i = 0; i < backbone_channels.size(); ++i) h = conv_out(h);
  return h;
}

int ModelConfig::grid_width() const {
  int w = image_width;
  for (std::size_t i = 0; i < backbone_channels.size(); ++i) w = conv_out(w);
  return w;
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"chunk_size", c.chunk_size},
                     {"latent_dim", c.latent_dim},
                     {"hidden_dim", c.hidden_dim},
                     {"num_heads", c.num_heads},
                     {"encoder_layers", c.encoder_layers},
                     {"decoder_layers", c.decoder_layers},
                     {"feedforward_dim", c.feedforward_dim},
                     {"backbone_channels", c.backbone_channels},
                     {"image_height", c.image_height},
                     {"image_width", c.image_width},
                     {"use_haptics", c.use_haptics},
                     {"cameras", c.cameras}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  const ModelConfig d;
  c.chunk_size = j.value("chunk_size", d.chunk_size);
  c.latent_dim = j.value("latent_dim", d.latent_dim);
  c.hidden_dim = j.value("hidden_dim", d.hidden_dim);
  c.num_heads = j.value("num_heads", d.num_heads);
  c.encoder_layers = j.value("encoder_layers", d.encoder_layers);
  c.decoder_layers = j.value("decoder_layers", d.decoder_layers);
  c.feedforward_dim = j.value("feedforward_dim", d.feedforward_dim);
  c.backbone_channels = j.value("backbone_channels", d.backbone_channels);
  c.image_height = j.value("image_height", d.image_height);
  c.image_width = j.value("image_width", d.image_width);
  c.use_haptics = j.value("use_haptics", d.use_haptics);
  c.cameras = j.value("cameras", d.cameras);
}

torch::Tensor kl_divergence(const torch::Tensor& mu, const torch::Tensor& logvar) {
  const auto per_dim = -0.5 * (1.0 + logvar - mu.pow(2) - logvar.exp());
  return per_dim.sum(-1).mean();
}

LossBreakdown act_loss(const torch::Tensor& pred, const torch::Tensor& truth,
                       const torch::Tensor& mask, const LatentStyle& style, double beta) {
  if (pred.sizes() != truth.sizes()) throw std::invalid_argument("pred and truth shapes differ");
  if (mask.dim() != 2 || mask.size(0) != pred.size(0) || mask.size(1) != pred.size(1)) {
    throw std::invalid_argument("mask must be [B,k]");
  }
  const auto m = mask.to(pred.dtype()).unsqueeze(-1);
  const double valid = m.sum().item<double>();
  if (valid <= 0.0) throw DegenerateChunkError("action chunk has no valid entries");
  LossBreakdown out;
  out.mse = ((pred - truth).pow(2) * m).sum() / (valid * pred.size(-1));
  out.kl = kl_divergence(style.mu, style.logvar);
  out.total = out.mse + beta * out.kl;
  return out;
}

ImageBackboneImpl::ImageBackboneImpl(const std::vector<int>& channels, int out_dim) {
  convs_ = register_module("convs", nn::Sequential());
  int in = 3;
  for (int ch : channels) {
    convs_->push_back(nn::Conv2d(nn::Conv2dOptions(in, ch, 3).stride(2).padding(1)));
    convs_->push_back(nn::ReLU());
    in = ch;
  }
  project_ = register_module("project", nn::Conv2d(nn::Conv2dOptions(in, out_dim, 1)));
}

torch::Tensor ImageBackboneImpl::forward(const torch::Tensor& images) {
  auto x = project_->forward(convs_->forward(images));  // [B,E,h,w]
  return x.flatten(2).transpose(1, 2);                  // [B,h*w,E]
}

HapticActImpl::HapticActImpl(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const int e = config_.hidden_dim;
  const int k = config_.chunk_size;
  const int tokens_per_camera = config_.grid_height() * config_.grid_width();
  const int low_dim = config_.use_haptics ? 3 : 2;  // latent, joints, forces

  for (std::size_t c = 0; c < config_.cameras.size(); ++c) {
    const std::string name = "backbone_" + config_.cameras[c];
    backbones_.push_back(register_module(name, ImageBackbone(config_.backbone_channels, e)));
    image_pos_.push_back(register_parameter("image_pos_" + config_.cameras[c],
                                            0.02 * torch::randn({1, tokens_per_camera, e})));
  }
  joint_proj_ = register_module("joint_proj", nn::Linear(kJointDim, e));
  style_joint_proj_ = register_module("style_joint_proj", nn::Linear(kJointDim, e));
  if (config_.use_haptics) {
    force_proj_ = register_module("force_proj", nn::Linear(kForceDim, e));
    style_force_proj_ = register_module("style_force_proj", nn::Linear(kForceDim, e));
  }
  action_proj_ = register_module("action_proj", nn::Linear(kActionDim, e));
  latent_head_ = register_module("latent_head", nn::Linear(e, 2 * config_.latent_dim));
  latent_proj_ = register_module("latent_proj", nn::Linear(config_.latent_dim, e));

  cls_token_ = register_parameter("cls_token", 0.02 * torch::randn({1, 1, e}));
  style_pos_ = register_parameter("style_pos", 0.02 * torch::randn({1, 1 + (low_dim - 1) + k, e}));
  memory_pos_ = register_parameter("memory_pos", 0.02 * torch::randn({1, low_dim, e}));
  queries_ = register_parameter("queries", 0.02 * torch::randn({1, k, e}));

  style_encoder_ = register_module("style_encoder", make_encoder(config_, config_.encoder_layers));
  memory_encoder_ = register_module("memory_encoder", make_encoder(config_, config_.encoder_layers));
  nn::TransformerDecoderLayerOptions dec_opts(e, config_.num_heads);
  dec_opts.dim_feedforward(config_.feedforward_dim).dropout(0.0);
  decoder_ = register_module(
      "decoder", nn::TransformerDecoder(nn::TransformerDecoderOptions(
                     nn::TransformerDecoderLayer(dec_opts), config_.decoder_layers)));
  action_head_ = register_module("action_head", nn::Linear(e, kActionDim));
}

void HapticActImpl::check_observation(const Observation& obs) const {
  if (!obs.joints.defined() || obs.joints.dim() != 2 || obs.joints.size(1) != kJointDim) {
    throw InputArityError("joints must be [B,13]");
  }
  const auto b = obs.joints.size(0);
  if (config_.use_haptics) {
    if (!obs.forces || !obs.forces->defined()) {
      throw InputArityError("model uses haptics but no force observation was given");
    }
    if (obs.forces->dim() != 2 || obs.forces->size(0) != b || obs.forces->size(1) != kForceDim) {
      throw InputArityError("forces must be [B,5]");
    }
  }
  if (obs.images.size() != config_.cameras.size()) {
    throw InputArityError("expected " + std::to_string(config_.cameras.size()) +
                          " camera images, got " + std::to_string(obs.images.size()));
  }
  for (const auto& img : obs.images) {
    if (img.dim() != 4 || img.size(0) != b || img.size(1) != 3 ||
        img.size(2) != config_.image_height || img.size(3) != config_.image_width) {
      throw InputArityError("camera images must be [B,3," + std::to_string(config_.image_height) +
                            "," + std::to_string(config_.image_width) + "]");
    }
  }
}

torch::Tensor HapticActImpl::low_dim_tokens(const Observation& obs, bool style_branch) {
  auto& jp = style_branch ? style_joint_proj_ : joint_proj_;
  std::vector<torch::Tensor> tokens = {jp->forward(obs.joints).unsqueeze(1)};
  if (config_.use_haptics) {
    auto& fp = style_branch ? style_force_proj_ : force_proj_;
    tokens.push_back(fp->forward(*obs.forces).unsqueeze(1));
  }
  return torch::cat(tokens, 1);
}

LatentStyle HapticActImpl::encode_style(const Observation& obs, const torch::Tensor& actions,
                                        const torch::Tensor& mask) {
  check_observation(obs);
  const auto b = obs.batch_size();
  if (actions.dim() != 3 || actions.size(1) != config_.chunk_size || actions.size(2) != kActionDim) {
    throw ConfigError("action chunk must be [B," + std::to_string(config_.chunk_size) + ",13]");
  }
  if (mask.dim() != 2 || mask.size(0) != b || mask.size(1) != config_.chunk_size) {
    throw ConfigError("mask must be [B," + std::to_string(config_.chunk_size) + "]");
  }
  auto tokens = torch::cat({cls_token_.expand({b, 1, config_.hidden_dim}), low_dim_tokens(obs, true),
                            action_proj_->forward(actions)},
                           1) +
                style_pos_;
  const auto leading = torch::zeros({b, tokens.size(1) - config_.chunk_size},
                                    torch::TensorOptions().dtype(torch::kBool));
  const auto padding = torch::cat({leading, mask.to(torch::kBool).logical_not()}, 1);
  const auto out = style_encoder_->forward(tokens.transpose(0, 1), {}, padding);
  const auto stats = latent_head_->forward(out[0]);
  return {stats.narrow(1, 0, config_.latent_dim), stats.narrow(1, config_.latent_dim, config_.latent_dim)};
}

torch::Tensor HapticActImpl::decode_actions(const Observation& obs, const torch::Tensor& z) {
  check_observation(obs);
  const auto b = obs.batch_size();
  if (z.dim() != 2 || z.size(0) != b || z.size(1) != config_.latent_dim) {
    throw ConfigError("latent must be [B," + std::to_string(config_.latent_dim) + "]");
  }
  std::vector<torch::Tensor> memory = {
      torch::cat({latent_proj_->forward(z).unsqueeze(1), low_dim_tokens(obs, false)}, 1) +
      memory_pos_};
  for (std::size_t c = 0; c < backbones_.size(); ++c) {
    memory.push_back(backbones_[c]->forward(obs.images[c]) + image_pos_[c]);
  }
  const auto encoded = memory_encoder_->forward(torch::cat(memory, 1).transpose(0, 1));
  const auto tgt = queries_.expand({b, config_.chunk_size, config_.hidden_dim}).transpose(0, 1);
  const auto decoded = decoder_->forward(tgt, encoded);
  return action_head_->forward(decoded.transpose(0, 1));
}

HapticActImpl::TrainOutput HapticActImpl::forward_train(const Observation& obs,
                                                        const torch::Tensor& actions,
                                                        const torch::Tensor& mask,
                                                        const torch::Tensor& eps) {
  TrainOutput out;
  out.style = encode_style(obs, actions, mask);
  if (eps.sizes() != out.style.mu.sizes()) throw std::invalid_argument("eps must be [B,D]");
  const auto z = out.style.mu + (0.5 * out.style.logvar).exp() * eps;
  out.pred = decode_actions(obs, z);
  return out;
}

torch::Tensor HapticActImpl::infer(const Observation& obs) {
  check_observation(obs);
  const auto z = torch::zeros({obs.batch_size(), config_.latent_dim}, obs.joints.options());
  return decode_actions(obs, z);
}

std::vector<std::pair<std::string, torch::Tensor>> named_weights(HapticAct& model) {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  for (const auto& item : model->named_parameters()) out.emplace_back(item.key(), item.value());
  for (const auto& item : model->named_buffers()) out.emplace_back(item.key(), item.value());
  return out;
}

}  // namespace hact::model
