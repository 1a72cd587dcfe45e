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

#include "hact/trainer/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "hact/datastore/manifest.hpp"
#include "hact/model/inputs.hpp"

namespace hact::train {

namespace fs = std::filesystem;

void TrainConfig::validate() const {
  if (steps <= 0) throw ConfigError("steps must be > 0");
  if (batch_size <= 0) throw ConfigError("batch_size must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (checkpoint_interval <= 0 || log_interval <= 0) throw ConfigError("intervals must be > 0");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must be in [0, 1)");
  }
  if (!(grad_clip > 0.0)) throw ConfigError("grad_clip must be > 0");
  if (validation_batches <= 0 || validation_batch_size <= 0) {
    throw ConfigError("validation batch settings must be > 0");
  }
  if (lr_schedule != "constant" && lr_schedule != "cosine") {
    throw ConfigError("lr_schedule must be constant or cosine, got " + lr_schedule);
  }
}

double scheduled_learning_rate(const TrainConfig& c, std::int64_t completed) {
  if (c.lr_schedule != "cosine") return c.learning_rate;
  const double progress = std::clamp(static_cast<double>(completed) / c.steps, 0.0, 1.0);
  return 0.5 * c.learning_rate * (1.0 + std::cos(std::numbers::pi * progress));
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"steps", c.steps},
                     {"batch_size", c.batch_size},
                     {"learning_rate", c.learning_rate},
                     {"beta", c.beta},
                     {"seed", c.seed},
                     {"checkpoint_interval", c.checkpoint_interval},
                     {"log_interval", c.log_interval},
                     {"validation_fraction", c.validation_fraction},
                     {"grad_clip", c.grad_clip},
                     {"validation_batches", c.validation_batches},
                     {"validation_batch_size", c.validation_batch_size},
                     {"lr_schedule", c.lr_schedule}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  const TrainConfig d;
  c.steps = j.value("steps", d.steps);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.beta = j.value("beta", d.beta);
  c.seed = j.value("seed", d.seed);
  c.checkpoint_interval = j.value("checkpoint_interval", d.checkpoint_interval);
  c.log_interval = j.value("log_interval", d.log_interval);
  c.validation_fraction = j.value("validation_fraction", d.validation_fraction);
  c.grad_clip = j.value("grad_clip", d.grad_clip);
  c.validation_batches = j.value("validation_batches", d.validation_batches);
  c.validation_batch_size = j.value("validation_batch_size", d.validation_batch_size);
  c.lr_schedule = j.value("lr_schedule", d.lr_schedule);
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  RunConfig rc;
  try {
    const auto j = nlohmann::json::parse(in);
    rc.model = j.value("model", nlohmann::json::object()).get<model::ModelConfig>();
    rc.train = j.value("train", nlohmann::json::object()).get<TrainConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  rc.model.validate();
  rc.train.validate();
  return rc;
}

void save_run_config(const RunConfig& config, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << nlohmann::json{{"model", config.model}, {"train", config.train}}.dump(2) << "\n";
}

nlohmann::json to_json(const TrainRecord& r) {
  return {{"step", r.step},
          {"train_mse", r.train_mse},
          {"train_kl", r.train_kl},
          {"train_total", r.train_total},
          {"val_mse", r.val_mse ? nlohmann::json(*r.val_mse) : nlohmann::json(nullptr)},
          {"wall_time", r.wall_time}};
}

std::vector<NamedEpisode> load_named_episodes(const fs::path& dataset_dir) {
  const auto manifest = data::load_manifest(dataset_dir);
  if (manifest.files.empty()) throw EmptyDatasetError("empty dataset: " + dataset_dir.string());
  std::vector<NamedEpisode> out;
  for (const auto& f : manifest.files) out.push_back({f, data::read_episode(dataset_dir / f)});
  return out;
}

Split split_episodes(std::size_t count, double validation_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::mt19937_64 rng(seed ^ 0x243f6a8885a308d3ULL);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(count)));
  if (n_val >= count) n_val = count - 1;
  Split s;
  s.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

std::uint64_t step_seed(std::uint64_t seed, std::int64_t step) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(step + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

torch::Tensor gaussian(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, 1.0f);
  auto t = torch::empty({rows, cols});
  float* p = t.data_ptr<float>();
  for (std::int64_t i = 0; i < rows * cols; ++i) p[i] = n(rng);
  return t;
}

void check_episodes(const std::vector<NamedEpisode>& episodes, const model::ModelConfig& mc) {
  if (episodes.empty()) throw EmptyDatasetError("empty dataset");
  for (const auto& ne : episodes) {
    const auto& ep = ne.episode;
    if (ep.cameras.size() != mc.cameras.size()) {
      throw ConfigError(ne.name + ": camera count does not match the model config");
    }
    for (std::size_t c = 0; c < ep.cameras.size(); ++c) {
      if (ep.cameras[c].name != mc.cameras[c] || ep.cameras[c].height != mc.image_height ||
          ep.cameras[c].width != mc.image_width) {
        throw ConfigError(ne.name + ": camera '" + ep.cameras[c].name +
                          "' does not match the model config");
      }
    }
  }
}

double masked_mse_sum(model::HapticAct& m, const data::Batch& batch, const data::NormStats& stats,
                      double* valid) {
  torch::NoGradGuard no_grad;
  const auto obs = model::observation_from_batch(batch, stats, m->config());
  const auto truth = model::actions_from_batch(batch, stats);
  const auto mask = model::mask_from_batch(batch).unsqueeze(-1);
  const auto pred = m->infer(obs);
  *valid += mask.sum().item<double>() * model::kActionDim;
  return ((pred - truth).pow(2) * mask).sum().item<double>();
}

}  // namespace

struct Trainer::State {
  model::ModelConfig mc;
  TrainConfig tc;
  std::vector<NamedEpisode> episodes;
  fs::path out;
  std::vector<const data::Episode*> train_eps;
  std::vector<const data::Episode*> val_eps;
  std::vector<std::string> train_files;
  std::vector<std::string> val_files;
  data::NormStats stats;
  model::HapticAct model{nullptr};
  std::unique_ptr<torch::optim::Adam> opt;
  std::int64_t step = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::int64_t best_step = -1;
  std::vector<data::Batch> val_batches;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void assign_split(const std::vector<std::string>& train, const std::vector<std::string>& val) {
    std::map<std::string, const data::Episode*> by_name;
    for (const auto& ne : episodes) by_name[ne.name] = &ne.episode;
    auto pick = [&](const std::vector<std::string>& names, std::vector<const data::Episode*>& dst) {
      for (const auto& n : names) {
        auto it = by_name.find(n);
        if (it == by_name.end()) throw ConfigError("checkpoint refers to missing episode " + n);
        dst.push_back(it->second);
      }
    };
    train_files = train;
    val_files = val;
    pick(train, train_eps);
    pick(val, val_eps);
  }

  void make_optimizer() {
    opt = std::make_unique<torch::optim::Adam>(model->parameters(),
                                               torch::optim::AdamOptions(tc.learning_rate));
  }

  void make_validation_batches() {
    // Without held-out episodes the training episodes stand in.
    const auto& source = val_eps.empty() ? train_eps : val_eps;
    data::BatchSampler sampler(source, step_seed(tc.seed, -1));
    for (int i = 0; i < tc.validation_batches; ++i) {
      val_batches.push_back(sampler.next(tc.validation_batch_size, mc.chunk_size));
    }
  }
};

Trainer::Trainer(std::unique_ptr<State> state) : s_(std::move(state)) {}
Trainer::Trainer(Trainer&&) noexcept = default;
Trainer& Trainer::operator=(Trainer&&) noexcept = default;
Trainer::~Trainer() = default;

Trainer::Trainer(model::ModelConfig model_config, TrainConfig train_config,
                 std::vector<NamedEpisode> episodes, fs::path out_dir)
    : s_(std::make_unique<State>()) {
  model_config.validate();
  train_config.validate();
  check_episodes(episodes, model_config);
  s_->mc = std::move(model_config);
  s_->tc = train_config;
  s_->episodes = std::move(episodes);
  s_->out = std::move(out_dir);

  const Split split = split_episodes(s_->episodes.size(), s_->tc.validation_fraction, s_->tc.seed);
  std::vector<std::string> train, val;
  for (auto i : split.train) train.push_back(s_->episodes[i].name);
  for (auto i : split.validation) val.push_back(s_->episodes[i].name);
  s_->assign_split(train, val);
  s_->stats = data::compute_norm_stats(std::span<const data::Episode* const>(s_->train_eps));

  torch::manual_seed(s_->tc.seed);
  s_->model = model::HapticAct(s_->mc);
  s_->make_optimizer();
  s_->make_validation_batches();
}

Trainer Trainer::resume(const fs::path& checkpoint, const model::ModelConfig& model_config,
                        TrainConfig train_config, std::vector<NamedEpisode> episodes,
                        fs::path out_dir) {
  model::Checkpoint ck = model::load_checkpoint(checkpoint);
  if (!ck.trainer) {
    throw model::IncompatibleCheckpointError(checkpoint.string() + ": no trainer state to resume");
  }
  if (!(ck.config == model_config)) {
    throw model::IncompatibleCheckpointError(
        checkpoint.string() + ": model config differs from the checkpoint (stored " +
        nlohmann::json(ck.config).dump() + ")");
  }
  train_config.validate();
  check_episodes(episodes, model_config);
  auto s = std::make_unique<State>();
  s->mc = ck.config;
  s->tc = train_config;
  s->episodes = std::move(episodes);
  s->out = std::move(out_dir);
  s->assign_split(ck.trainer->train_files, ck.trainer->validation_files);
  s->stats = ck.stats;
  s->model = ck.model;
  s->model->train();
  s->make_optimizer();
  {
    std::istringstream in(ck.trainer->optimizer);
    torch::serialize::InputArchive archive;
    archive.load_from(in);
    s->opt->load(archive);
  }
  s->step = ck.trainer->step;
  s->best_val = ck.trainer->best_validation;
  s->best_step = ck.trainer->best_step;
  s->make_validation_batches();
  return Trainer(std::move(s));
}

StepLoss Trainer::step() {
  const std::uint64_t seed = step_seed(s_->tc.seed, s_->step + 1);
  data::BatchSampler sampler(s_->train_eps, seed);
  const data::Batch batch = sampler.next(s_->tc.batch_size, s_->mc.chunk_size);
  return step_on(batch, seed ^ 0x6a09e667f3bcc909ULL);
}

StepLoss Trainer::step_on(const data::Batch& batch, std::uint64_t eps_seed) {
  auto& m = s_->model;
  m->train();
  const auto obs = model::observation_from_batch(batch, s_->stats, s_->mc);
  const auto truth = model::actions_from_batch(batch, s_->stats);
  const auto mask = model::mask_from_batch(batch);
  const auto eps = gaussian(batch.batch_size, s_->mc.latent_dim, eps_seed);

  s_->opt->zero_grad();
  const auto out = m->forward_train(obs, truth, mask, eps);
  const auto loss = model::act_loss(out.pred, truth, mask, out.style, s_->tc.beta);
  StepLoss r{loss.mse.item<double>(), loss.kl.item<double>(), loss.total.item<double>()};
  if (!std::isfinite(r.total)) {
    fs::create_directories(s_->out);
    const fs::path good = s_->out / "last_good.haxc";
    save(good);
    throw TrainingDivergedError("non-finite loss at step " + std::to_string(s_->step + 1) +
                                "; last good weights saved to " + good.string());
  }
  loss.total.backward();
  torch::nn::utils::clip_grad_norm_(m->parameters(), s_->tc.grad_clip);
  // Set every step, so a resumed run picks up a new rate or schedule too.
  const double lr = scheduled_learning_rate(s_->tc, s_->step);
  for (auto& group : s_->opt->param_groups()) {
    static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
  }
  s_->opt->step();
  ++s_->step;
  return r;
}

double Trainer::validation_mse() {
  double sum = 0.0, valid = 0.0;
  for (const auto& b : s_->val_batches) sum += masked_mse_sum(s_->model, b, s_->stats, &valid);
  s_->model->train();
  return sum / valid;
}

void Trainer::save(const fs::path& path) {
  model::TrainerState st;
  st.step = s_->step;
  st.best_validation = std::isfinite(s_->best_val) ? s_->best_val : -1.0;
  st.best_step = s_->best_step;
  st.train_config = s_->tc;
  st.train_files = s_->train_files;
  st.validation_files = s_->val_files;
  std::ostringstream os;
  torch::serialize::OutputArchive archive;
  s_->opt->save(archive);
  archive.save_to(os);
  st.optimizer = os.str();
  model::save_checkpoint(path, s_->model, s_->stats, &st);
}

std::vector<TrainRecord> Trainer::run(const std::function<void(const TrainRecord&)>& on_record) {
  fs::create_directories(s_->out);
  const bool fresh = s_->step == 0;
  std::ofstream log(s_->out / "train_log.jsonl", fresh ? std::ios::trunc : std::ios::app);
  if (!log) throw Error("cannot write " + (s_->out / "train_log.jsonl").string());
  if (s_->best_val < 0) s_->best_val = std::numeric_limits<double>::infinity();

  std::vector<TrainRecord> records;
  while (s_->step < s_->tc.steps) {
    const StepLoss l = step();
    const bool last = s_->step == s_->tc.steps;
    if (s_->step % s_->tc.log_interval == 0 || last) {
      TrainRecord r;
      r.step = s_->step;
      r.train_mse = l.mse;
      r.train_kl = l.kl;
      r.train_total = l.total;
      r.val_mse = validation_mse();
      r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - s_->start).count();
      if (*r.val_mse < s_->best_val) {
        s_->best_val = *r.val_mse;
        s_->best_step = s_->step;
        save(s_->out / "best.haxc");
      }
      log << to_json(r).dump() << "\n" << std::flush;
      records.push_back(r);
      if (on_record) on_record(r);
    }
    if (s_->step % s_->tc.checkpoint_interval == 0 || last) save(s_->out / "last.haxc");
  }
  return records;
}

std::int64_t Trainer::current_step() const { return s_->step; }
model::HapticAct& Trainer::model() { return s_->model; }
const data::NormStats& Trainer::stats() const { return s_->stats; }
const model::ModelConfig& Trainer::model_config() const { return s_->mc; }
const TrainConfig& Trainer::train_config() const { return s_->tc; }
const fs::path& Trainer::out_dir() const { return s_->out; }

double dataset_mse(model::HapticAct& m, std::span<const data::Episode* const> episodes,
                   const data::NormStats& stats, int batch_size) {
  std::vector<std::pair<int, std::int64_t>> picks;
  double sum = 0.0, valid = 0.0;
  auto flush = [&] {
    if (picks.empty()) return;
    const auto batch = data::gather_batch(episodes, picks, m->config().chunk_size);
    sum += masked_mse_sum(m, batch, stats, &valid);
    picks.clear();
  };
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    for (std::int64_t t = 0; t < episodes[e]->length(); ++t) {
      picks.emplace_back(static_cast<int>(e), t);
      if (static_cast<int>(picks.size()) == batch_size) flush();
    }
  }
  flush();
  if (valid == 0.0) throw EmptyDatasetError("empty dataset");
  return sum / valid;
}

}  // namespace hact::train
