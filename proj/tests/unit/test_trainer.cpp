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
#include <set>

#include <gtest/gtest.h>

#include "hact/model/inputs.hpp"
#include "hact/trainer/trainer.hpp"

namespace hact::train {
namespace {

namespace fs = std::filesystem;

model::ModelConfig tiny_model(int k = 4) {
  model::ModelConfig c;
  c.chunk_size = k;
  c.latent_dim = 4;
  c.hidden_dim = 16;
  c.num_heads = 2;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.feedforward_dim = 32;
  c.backbone_channels = {4, 8};
  c.image_height = 8;
  c.image_width = 8;
  c.cameras = {"front"};
  return c;
}

TrainConfig tiny_train(int steps) {
  TrainConfig t;
  t.steps = steps;
  t.batch_size = 4;
  t.learning_rate = 1e-3;
  t.seed = 5;
  t.log_interval = 5;
  t.checkpoint_interval = 10;
  t.validation_batches = 2;
  t.validation_batch_size = 8;
  // A cosine schedule depends on the total step count, which the split-resume
  // test changes between legs.
  t.lr_schedule = "constant";
  return t;
}

std::vector<NamedEpisode> synthetic(int count, int length = 30) {
  std::vector<NamedEpisode> out;
  std::mt19937_64 rng(77);
  std::normal_distribution<float> n(0.0f, 1.0f);
  for (int e = 0; e < count; ++e) {
    data::EpisodeBuilder b({"front"}, 8, 8);
    std::vector<std::uint8_t> img(8 * 8 * 3);
    for (int t = 0; t < length; ++t) {
      for (auto& p : img) p = static_cast<std::uint8_t>(rng());
      std::array<float, 13> j{}, a{};
      std::array<float, 5> f{};
      for (int i = 0; i < 13; ++i) {
        j[i] = std::sin(0.1f * t + i) + 0.1f * e;
        a[i] = std::sin(0.1f * (t + 1) + i) + 0.1f * e;
      }
      for (int i = 0; i < 5; ++i) f[i] = std::abs(n(rng));
      const std::array<std::span<const std::uint8_t>, 1> frames = {img};
      b.append(frames, j, f, a);
    }
    out.push_back({data::episode_file_name(e), std::move(b).finish({})});
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hact_trainer_" + name);
  fs::remove_all(dir);
  return dir;
}

bool same_weights(model::HapticAct& a, model::HapticAct& b) {
  const auto wa = model::named_weights(a);
  const auto wb = model::named_weights(b);
  if (wa.size() != wb.size()) return false;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (wa[i].first != wb[i].first || !torch::equal(wa[i].second, wb[i].second)) return false;
  }
  return true;
}

void expect_same_losses(const std::vector<TrainRecord>& a, const std::vector<TrainRecord>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].step, b[i].step);
    EXPECT_EQ(a[i].train_mse, b[i].train_mse);
    EXPECT_EQ(a[i].train_kl, b[i].train_kl);
    EXPECT_EQ(a[i].val_mse, b[i].val_mse);
  }
}

TEST(Trainer, CosineScheduleEndpoints) {
  TrainConfig c;
  c.steps = 2000;
  c.learning_rate = 3e-4;
  c.lr_schedule = "cosine";
  EXPECT_DOUBLE_EQ(scheduled_learning_rate(c, 0), 3e-4);
  EXPECT_NEAR(scheduled_learning_rate(c, 1000), 1.5e-4, 1e-18);
  EXPECT_NEAR(scheduled_learning_rate(c, 500), 1.5e-4 * (1.0 + std::sqrt(0.5)), 1e-18);
  EXPECT_NEAR(scheduled_learning_rate(c, 2000), 0.0, 1e-18);
  c.lr_schedule = "constant";
  EXPECT_DOUBLE_EQ(scheduled_learning_rate(c, 1500), 3e-4);
  c.lr_schedule = "step";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Trainer, SameSeedSameTrajectory) {
  Trainer a(tiny_model(), tiny_train(20), synthetic(5), scratch("det_a"));
  Trainer b(tiny_model(), tiny_train(20), synthetic(5), scratch("det_b"));
  const auto ra = a.run();
  const auto rb = b.run();
  expect_same_losses(ra, rb);
  EXPECT_TRUE(same_weights(a.model(), b.model()));
}

TEST(Trainer, SplitResumeEqualsUnbrokenRun) {
  Trainer whole(tiny_model(), tiny_train(20), synthetic(5), scratch("whole"));
  const auto full_log = whole.run();

  const fs::path dir = scratch("split");
  Trainer first(tiny_model(), tiny_train(10), synthetic(5), dir);
  auto log = first.run();
  Trainer second = Trainer::resume(dir / "last.haxc", tiny_model(), tiny_train(20), synthetic(5), dir);
  EXPECT_EQ(second.current_step(), 10);
  const auto rest = second.run();
  log.insert(log.end(), rest.begin(), rest.end());

  expect_same_losses(log, full_log);
  EXPECT_TRUE(same_weights(whole.model(), second.model()));

  std::ifstream in(dir / "train_log.jsonl");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 4);
}

TEST(Trainer, ResumeRejectsDifferentChunkSize) {
  const fs::path dir = scratch("guard");
  Trainer t(tiny_model(4), tiny_train(5), synthetic(3), dir);
  t.run();
  EXPECT_THROW(Trainer::resume(dir / "last.haxc", tiny_model(6), tiny_train(10), synthetic(3), dir),
               model::IncompatibleCheckpointError);
}

TEST(Trainer, ResumeFromBestContinuesValidationLoss) {
  const fs::path dir = scratch("best");
  Trainer t(tiny_model(), tiny_train(20), synthetic(10), dir);
  const auto log = t.run();
  double best = 1e300;
  for (const auto& r : log) best = std::min(best, *r.val_mse);
  Trainer again = Trainer::resume(dir / "best.haxc", tiny_model(), tiny_train(30), synthetic(10), dir);
  EXPECT_NEAR(again.validation_mse(), best, 1e-6 * best);
}

TEST(Trainer, LoggedTotalIsMsePlusBetaKl) {
  for (double beta : {0.0, 10.0}) {
    TrainConfig cfg = tiny_train(15);
    cfg.beta = beta;
    const fs::path dir = scratch("beta");
    Trainer t(tiny_model(), cfg, synthetic(4), dir);
    t.run();
    std::ifstream in(dir / "train_log.jsonl");
    int n = 0;
    for (std::string line; std::getline(in, line); ++n) {
      const auto j = nlohmann::json::parse(line);
      const double mse = j["train_mse"], kl = j["train_kl"], total = j["train_total"];
      EXPECT_GE(mse, 0.0);
      EXPECT_GE(kl, 0.0);
      if (beta == 0.0) {
        EXPECT_EQ(total, mse);
      } else {
        EXPECT_NEAR(total, mse + beta * kl, 1e-6 * total);
      }
      for (const char* key : {"step", "val_mse", "wall_time"}) EXPECT_TRUE(j.contains(key));
    }
    EXPECT_EQ(n, 3);
  }
}

TEST(Trainer, PaddedTargetsContributeNoGradient) {
  torch::manual_seed(0);
  const auto eps = synthetic(1, 10);
  const auto mc = tiny_model(6);
  model::HapticAct m(mc);
  const std::vector<const data::Episode*> ptrs = {&eps[0].episode};
  const auto stats = data::compute_norm_stats(std::span<const data::Episode* const>(ptrs));
  const std::array<std::pair<int, std::int64_t>, 2> picks = {{{0, 7}, {0, 9}}};
  data::Batch batch = data::gather_batch(ptrs, picks, mc.chunk_size);
  const auto z_eps = torch::randn({2, mc.latent_dim});

  auto grads = [&](const data::Batch& b) {
    m->zero_grad();
    const auto obs = model::observation_from_batch(b, stats, mc);
    const auto truth = model::actions_from_batch(b, stats);
    const auto mask = model::mask_from_batch(b);
    const auto out = m->forward_train(obs, truth, mask, z_eps);
    model::act_loss(out.pred, truth, mask, out.style, 10.0).total.backward();
    std::vector<torch::Tensor> g;
    for (const auto& p : m->parameters()) g.push_back(p.grad().clone());
    return g;
  };
  const auto before = grads(batch);
  for (std::size_t i = 0; i < batch.mask.size(); ++i) {
    if (batch.mask[i]) continue;
    for (int d = 0; d < 13; ++d) batch.actions[i * 13 + d] += 50.0f;
  }
  const auto after = grads(batch);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_TRUE(torch::equal(before[i], after[i]));
}

TEST(Trainer, NonFiniteLossAbortsWithLastGoodCheckpoint) {
  const fs::path dir = scratch("nan");
  Trainer t(tiny_model(), tiny_train(10), synthetic(2), dir);
  t.step();
  auto eps = synthetic(1, 10);
  const std::vector<const data::Episode*> ptrs = {&eps[0].episode};
  const std::array<std::pair<int, std::int64_t>, 1> picks = {{{0, 0}}};
  data::Batch batch = data::gather_batch(ptrs, picks, 4);
  batch.actions[3] = std::nanf("");
  try {
    t.step_on(batch, 1);
    FAIL() << "expected TrainingDivergedError";
  } catch (const TrainingDivergedError& e) {
    EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos) << e.what();
  }
  auto ck = model::load_checkpoint(dir / "last_good.haxc");
  ASSERT_TRUE(ck.trainer.has_value());
  EXPECT_EQ(ck.trainer->step, 1);
  EXPECT_TRUE(same_weights(ck.model, t.model()));
}

TEST(Trainer, EmptyDatasetIsRejected) {
  EXPECT_THROW(Trainer(tiny_model(), tiny_train(5), {}, scratch("empty")), EmptyDatasetError);
  EXPECT_THROW(load_named_episodes(scratch("empty_dir")), Error);
}

TEST(Trainer, StatsComeFromTrainingSplitOnly) {
  auto eps = synthetic(10);
  Trainer t(tiny_model(), tiny_train(5), eps, scratch("stats"));
  const Split split = split_episodes(10, 0.1, 5);
  std::vector<const data::Episode*> train;
  for (auto i : split.train) train.push_back(&eps[i].episode);
  EXPECT_EQ(t.stats(), data::compute_norm_stats(std::span<const data::Episode* const>(train)));
  std::vector<data::Episode> all;
  for (auto& e : eps) all.push_back(e.episode);
  EXPECT_NE(t.stats(), data::compute_norm_stats(all));
}

TEST(Split, WholeEpisodesWithoutOverlap) {
  const Split s = split_episodes(50, 0.1, 3);
  EXPECT_EQ(s.validation.size(), 5u);
  EXPECT_EQ(s.train.size(), 45u);
  std::set<std::size_t> seen(s.train.begin(), s.train.end());
  for (auto v : s.validation) EXPECT_TRUE(seen.insert(v).second);
  EXPECT_EQ(seen.size(), 50u);
  const Split single = split_episodes(1, 0.1, 3);
  EXPECT_TRUE(single.validation.empty());
  EXPECT_EQ(single.train.size(), 1u);
}

TEST(RunConfig, ShippedFileMatchesDefaults) {
  const RunConfig rc = load_run_config(fs::path(HACT_SOURCE_DIR) / "config/train_config.json");
  EXPECT_EQ(rc.model, model::ModelConfig{});
  EXPECT_EQ(rc.train, TrainConfig{});
  TrainConfig bad;
  bad.validation_fraction = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = TrainConfig{};
  bad.steps = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

}  // namespace
}  // namespace hact::train
