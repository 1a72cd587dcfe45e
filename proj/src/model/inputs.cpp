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

#include "hact/model/inputs.hpp"

namespace hact::model {

namespace {

torch::Tensor normalized(std::span<const float> raw, const data::Moments& m, std::int64_t rows) {
  const auto dim = static_cast<std::int64_t>(m.size());
  if (static_cast<std::int64_t>(raw.size()) != rows * dim) {
    throw std::invalid_argument("array size does not match normalization statistics");
  }
  auto out = torch::empty({rows, dim});
  auto acc = out.accessor<float, 2>();
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t i = 0; i < dim; ++i) {
      acc[r][i] = static_cast<float>((raw[r * dim + i] - m.mean[i]) / m.std[i]);
    }
  }
  return out;
}

torch::Tensor images_tensor(std::span<const std::uint8_t> pixels, std::int64_t b, int h, int w) {
  if (static_cast<std::int64_t>(pixels.size()) != b * h * w * 3) {
    throw InputArityError("camera frame has the wrong size for the model image shape");
  }
  auto t = torch::from_blob(const_cast<std::uint8_t*>(pixels.data()), {b, h, w, 3}, torch::kUInt8);
  return t.permute({0, 3, 1, 2}).to(torch::kFloat32).div_(255.0f).contiguous();
}

}  // namespace

Observation observation_from_batch(const data::Batch& batch, const data::NormStats& stats,
                                   const ModelConfig& config) {
  const std::int64_t b = batch.batch_size;
  if (batch.images.size() != config.cameras.size()) {
    throw InputArityError("batch camera count does not match the model");
  }
  Observation obs;
  for (const auto& img : batch.images) {
    obs.images.push_back(images_tensor(img, b, config.image_height, config.image_width));
  }
  obs.joints = normalized(batch.joints, stats.joints, b);
  if (config.use_haptics) obs.forces = normalized(batch.forces, stats.forces, b);
  return obs;
}

torch::Tensor actions_from_batch(const data::Batch& batch, const data::NormStats& stats) {
  const std::int64_t rows = static_cast<std::int64_t>(batch.batch_size) * batch.chunk_size;
  return normalized(batch.actions, stats.actions, rows)
      .view({batch.batch_size, batch.chunk_size, kActionDim});
}

torch::Tensor mask_from_batch(const data::Batch& batch) {
  auto m = torch::empty({batch.batch_size, batch.chunk_size});
  auto acc = m.accessor<float, 2>();
  for (int i = 0; i < batch.batch_size; ++i) {
    for (int j = 0; j < batch.chunk_size; ++j) acc[i][j] = batch.mask[i * batch.chunk_size + j];
  }
  return m;
}

Observation observation_from_raw(std::span<const std::span<const std::uint8_t>> frames,
                                 std::span<const float> joints, std::span<const float> forces,
                                 const data::NormStats& stats, const ModelConfig& config) {
  if (frames.size() != config.cameras.size()) {
    throw InputArityError("frame count does not match the model cameras");
  }
  Observation obs;
  for (const auto& f : frames) {
    obs.images.push_back(images_tensor(f, 1, config.image_height, config.image_width));
  }
  obs.joints = normalized(joints, stats.joints, 1);
  if (config.use_haptics) obs.forces = normalized(forces, stats.forces, 1);
  return obs;
}

std::vector<std::vector<double>> denormalize_chunk(const torch::Tensor& chunk,
                                                   const data::NormStats& stats) {
  const auto c = chunk.to(torch::kFloat64).contiguous().view({-1, kActionDim});
  auto acc = c.accessor<double, 2>();
  std::vector<std::vector<double>> out(c.size(0), std::vector<double>(kActionDim));
  for (std::int64_t t = 0; t < c.size(0); ++t) {
    for (int i = 0; i < kActionDim; ++i) {
      out[t][i] = acc[t][i] * stats.actions.std[i] + stats.actions.mean[i];
    }
  }
  return out;
}

}  // namespace hact::model
