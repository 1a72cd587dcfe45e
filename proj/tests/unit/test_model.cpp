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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "hact/model/checkpoint.hpp"
#include "hact/model/model.hpp"

namespace hact::model {
namespace {

namespace fs = std::filesystem;

ModelConfig small_config(int k = 4, int d = 8, bool haptics = true) {
  ModelConfig c;
  c.chunk_size = k;
  c.latent_dim = d;
  c.hidden_dim = 16;
  c.num_heads = 2;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.feedforward_dim = 32;
  c.backbone_channels = {4, 8};
  c.image_height = 8;
  c.image_width = 8;
  c.use_haptics = haptics;
  c.cameras = {"front"};
  return c;
}

Observation random_observation(const ModelConfig& c, std::int64_t b,
                               torch::Dtype dtype = torch::kFloat32) {
  Observation obs;
  for (std::size_t i = 0; i < c.cameras.size(); ++i) {
    obs.images.push_back(torch::rand({b, 3, c.image_height, c.image_width}, dtype));
  }
  obs.joints = torch::randn({b, kJointDim}, dtype);
  if (c.use_haptics) obs.forces = torch::randn({b, kForceDim}, dtype);
  return obs;
}

TEST(ModelShape, DefaultConfigProducesChunk) {
  torch::manual_seed(0);
  const ModelConfig c;
  HapticAct model(c);
  model->eval();
  const auto out = model->infer(random_observation(c, 2));
  EXPECT_EQ(out.sizes(), (std::vector<std::int64_t>{2, 20, 13}));
}

TEST(ModelShape, PropertySampledConfigs) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 12);
    const int d = 1 + static_cast<int>(rng() % 16);
    const int b = 1 + static_cast<int>(rng() % 4);
    const bool haptics = rng() % 2;
    torch::manual_seed(trial);
    const ModelConfig c = small_config(k, d, haptics);
    HapticAct model(c);
    const auto obs = random_observation(c, b);
    const auto actions = torch::randn({b, k, kActionDim});
    const auto mask = torch::ones({b, k});
    const auto style = model->encode_style(obs, actions, mask);
    EXPECT_EQ(style.mu.sizes(), (std::vector<std::int64_t>{b, d}));
    EXPECT_EQ(style.logvar.sizes(), (std::vector<std::int64_t>{b, d}));
    const auto out = model->decode_actions(obs, torch::zeros({b, d}));
    EXPECT_EQ(out.sizes(), (std::vector<std::int64_t>{b, k, 13}));
  }
}

TEST(ModelShape, DefaultStyleIsLatentSized) {
  torch::manual_seed(1);
  const ModelConfig c;
  HapticAct model(c);
  const auto style =
      model->encode_style(random_observation(c, 3), torch::randn({3, 20, 13}), torch::ones({3, 20}));
  EXPECT_EQ(style.mu.sizes(), (std::vector<std::int64_t>{3, 32}));
}

TEST(ModelContract, ZeroLatentDecodingIsBitIdentical) {
  torch::manual_seed(2);
  const ModelConfig c = small_config();
  HapticAct model(c);
  model->eval();
  const auto obs = random_observation(c, 2);
  const auto a = model->infer(obs);
  const auto b = model->infer(obs);
  EXPECT_TRUE(torch::equal(a, b));
}

TEST(ModelContract, HapticsRequiresForces) {
  torch::manual_seed(3);
  const ModelConfig c = small_config();
  HapticAct model(c);
  auto obs = random_observation(c, 1);
  obs.forces.reset();
  EXPECT_THROW(model->infer(obs), InputArityError);
  obs = random_observation(c, 1);
  obs.images.clear();
  EXPECT_THROW(model->infer(obs), InputArityError);
}

TEST(ModelContract, AblatedModelIgnoresForceSlot) {
  torch::manual_seed(4);
  const ModelConfig c = small_config(5, 4, false);
  HapticAct model(c);
  model->eval();
  auto obs = random_observation(c, 2);
  const auto without = model->infer(obs);
  EXPECT_EQ(without.sizes(), (std::vector<std::int64_t>{2, 5, 13}));
  obs.forces = torch::randn({2, kForceDim}) * 100.0;
  EXPECT_TRUE(torch::equal(model->infer(obs), without));
  obs.forces = torch::full({2, kForceDim}, std::nan(""));
  EXPECT_TRUE(torch::equal(model->infer(obs), without));
}

TEST(ModelContract, MismatchedChunkIsConfigError) {
  torch::manual_seed(5);
  const ModelConfig c = small_config(4);
  HapticAct model(c);
  EXPECT_THROW(model->encode_style(random_observation(c, 1), torch::randn({1, 5, 13}),
                                   torch::ones({1, 5})),
               ConfigError);
}

TEST(ModelContract, PaddedActionsDoNotReachTheLatent) {
  torch::manual_seed(6);
  const ModelConfig c = small_config(6);
  HapticAct model(c);
  const auto obs = random_observation(c, 1);
  auto actions = torch::randn({1, 6, 13});
  auto mask = torch::tensor({{1.f, 1.f, 1.f, 0.f, 0.f, 0.f}});
  const auto a = model->encode_style(obs, actions, mask);
  actions.index_put_({0, torch::indexing::Slice(3)}, 42.0);
  const auto b = model->encode_style(obs, actions, mask);
  EXPECT_TRUE(torch::equal(a.mu, b.mu));
  EXPECT_TRUE(torch::equal(a.logvar, b.logvar));
}

TEST(ModelConfig, ValidationAndJson) {
  ModelConfig c;
  c.hidden_dim = 30;
  c.num_heads = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ModelConfig{};
  c.chunk_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  const ModelConfig s = small_config(7, 3, false);
  EXPECT_EQ(nlohmann::json(s).get<ModelConfig>(), s);
  EXPECT_EQ(ModelConfig{}.grid_height(), 4);
}

TEST(Loss, KlClosedForm) {
  const auto opts = torch::TensorOptions().dtype(torch::kFloat64);
  EXPECT_EQ(kl_divergence(torch::zeros({1, 32}, opts), torch::zeros({1, 32}, opts)).item<double>(), 0.0);
  // -1/2 (1 + log 1 - 1^2 - 1) = 1/2
  const double expected = -0.5 * (1.0 + std::log(1.0) - 1.0 * 1.0 - 1.0);
  const double kl = kl_divergence(torch::ones({1, 1}, opts), torch::zeros({1, 1}, opts)).item<double>();
  EXPECT_NEAR(kl, expected, 1e-9);
  EXPECT_NEAR(kl, 0.5, 1e-9);
}

TEST(Loss, KlIsNonNegative) {
  torch::manual_seed(7);
  for (int i = 0; i < 50; ++i) {
    const auto mu = torch::randn({4, 8}, torch::kFloat64) * 3.0;
    const auto logvar = torch::randn({4, 8}, torch::kFloat64) * 2.0;
    EXPECT_GE(kl_divergence(mu, logvar).item<double>(), 0.0);
  }
}

TEST(Loss, Decomposition) {
  torch::manual_seed(8);
  const auto opts = torch::TensorOptions().dtype(torch::kFloat64);
  const auto truth = torch::randn({2, 4, 13}, opts);
  const auto mask = torch::ones({2, 4}, opts);
  const LatentStyle prior{torch::zeros({2, 8}, opts), torch::zeros({2, 8}, opts)};
  EXPECT_EQ(act_loss(truth, truth, mask, prior, 10.0).total.item<double>(), 0.0);

  const auto unit = act_loss(truth + 1.0, truth, mask, prior, 10.0);
  EXPECT_DOUBLE_EQ(unit.mse.item<double>(), 1.0);

  const LatentStyle style{torch::randn({2, 8}, opts), torch::randn({2, 8}, opts)};
  const auto pred = torch::randn({2, 4, 13}, opts);
  const auto zero_beta = act_loss(pred, truth, mask, style, 0.0);
  EXPECT_EQ(zero_beta.total.item<double>(), zero_beta.mse.item<double>());
  const auto beta10 = act_loss(pred, truth, mask, style, 10.0);
  EXPECT_NEAR(beta10.total.item<double>(),
              beta10.mse.item<double>() + 10.0 * beta10.kl.item<double>(), 1e-12);
}

TEST(Loss, MaskedEntriesAreIgnored) {
  const auto opts = torch::TensorOptions().dtype(torch::kFloat64);
  auto truth = torch::zeros({1, 4, 13}, opts);
  auto pred = torch::ones({1, 4, 13}, opts).requires_grad_();
  const auto mask = torch::tensor({{1.0, 1.0, 0.0, 0.0}}, opts);
  const LatentStyle prior{torch::zeros({1, 2}, opts), torch::zeros({1, 2}, opts)};
  auto loss = act_loss(pred, truth, mask, prior, 1.0);
  EXPECT_DOUBLE_EQ(loss.mse.item<double>(), 1.0);
  loss.total.backward();
  const auto g1 = pred.grad().clone();
  pred.grad().zero_();
  truth.index_put_({0, torch::indexing::Slice(2)}, 123.0);
  act_loss(pred, truth, mask, prior, 1.0).total.backward();
  EXPECT_TRUE(torch::equal(g1, pred.grad()));
  EXPECT_EQ(g1.index({0, 3}).abs().sum().item<double>(), 0.0);
  EXPECT_THROW(act_loss(pred, truth, torch::zeros({1, 4}, opts), prior, 1.0), DegenerateChunkError);
}

TEST(Gradient, AnalyticMatchesCentralDifference) {
  torch::manual_seed(9);
  ModelConfig c = small_config(2, 4, true);
  HapticAct model(c);
  model->to(torch::kFloat64);
  const auto obs = random_observation(c, 2, torch::kFloat64);
  const auto actions = torch::randn({2, 2, 13}, torch::kFloat64);
  const auto mask = torch::tensor({{1.0, 1.0}, {1.0, 0.0}}, torch::kFloat64);
  const auto eps = torch::randn({2, 4}, torch::kFloat64);
  auto loss_value = [&] {
    const auto out = model->forward_train(obs, actions, mask, eps);
    return act_loss(out.pred, actions, mask, out.style, 10.0).total;
  };

  model->zero_grad();
  loss_value().backward();

  auto params = model->parameters();
  std::mt19937_64 rng(123);
  int checked = 0, agreed = 0, nonzero = 0;
  torch::NoGradGuard no_grad;
  while (checked < 150) {
    auto& p = params[rng() % params.size()];
    const auto flat = p.view(-1);
    const auto idx = static_cast<std::int64_t>(rng() % flat.numel());
    const double analytic = p.grad().view(-1)[idx].item<double>();
    // Round-off in the difference grows as eps * loss / h.
    const double h = 1e-4;
    const double orig = flat[idx].item<double>();
    flat[idx] = orig + h;
    const double up = loss_value().item<double>();
    flat[idx] = orig - h;
    const double down = loss_value().item<double>();
    flat[idx] = orig;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    ++checked;
    // Both below 1e-8: a structurally zero gradient, where a relative test is
    // meaningless at double rounding level.
    if (scale <= 1e-8) continue;
    ++nonzero;
    const bool ok = std::abs(analytic - numeric) <= 1e-3 * scale;
    agreed += ok;
    EXPECT_TRUE(ok) << "analytic " << analytic << " numeric " << numeric;
  }
  EXPECT_GE(agreed, 100);
  EXPECT_EQ(agreed, nonzero);
}

TEST(Checkpoint, RoundTripPreservesOutputs) {
  torch::manual_seed(10);
  const ModelConfig c = small_config(3, 2, true);
  HapticAct model(c);
  model->eval();
  data::NormStats stats;
  stats.joints = {std::vector<double>(13, 0.5), std::vector<double>(13, 2.0)};
  stats.forces = {std::vector<double>(5, 0.1), std::vector<double>(5, 1.0)};
  stats.actions = {std::vector<double>(13, -0.5), std::vector<double>(13, 3.0)};
  const fs::path dir = fs::temp_directory_path() / "hact_model_ckpt";
  fs::create_directories(dir);
  const fs::path path = dir / "model.haxc";
  TrainerState state;
  state.step = 17;
  state.optimizer = std::string("\x00\x01\x02opt", 6);
  state.train_config = {{"seed", 3}};
  save_checkpoint(path, model, stats, &state);

  Checkpoint ck = load_checkpoint(path);
  EXPECT_EQ(ck.config, c);
  EXPECT_EQ(ck.stats, stats);
  ASSERT_TRUE(ck.trainer.has_value());
  EXPECT_EQ(ck.trainer->step, 17);
  EXPECT_EQ(ck.trainer->optimizer, state.optimizer);
  const auto obs = random_observation(c, 2);
  EXPECT_TRUE(torch::equal(model->infer(obs), ck.model->infer(obs)));

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    f.put(static_cast<char>(9));
  }
  EXPECT_THROW(load_checkpoint(path), IncompatibleCheckpointError);

  save_checkpoint(path, model, stats);
  fs::resize_file(path, fs::file_size(path) - 4);
  EXPECT_THROW(load_checkpoint(path), ValidationError);
}

}  // namespace
}  // namespace hact::model
