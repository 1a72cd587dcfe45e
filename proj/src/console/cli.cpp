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

#include "hact/console/cli.hpp"

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hact/datastore/manifest.hpp"
#include "hact/datastore/recorder.hpp"
#include "hact/evalsuite/report.hpp"
#include "hact/evalsuite/rollout.hpp"
#include "hact/haptics.hpp"
#include "hact/simworld/config.hpp"
#include "hact/teleop/script.hpp"
#include "hact/teleop/server.hpp"
#include "hact/trainer/trainer.hpp"

namespace hact::console {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  bool json_mode = false;
  bool force = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  // Machine-readable lines with --json, plain text otherwise.
  void info(const std::string& text, const json& fields = json::object()) const {
    if (json_mode) {
      json j = fields;
      j["level"] = "info";
      j["message"] = text;
      *out << j.dump() << std::endl;
    } else {
      *out << text << std::endl;
    }
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Refuses to touch an existing, non-empty output unless --force was given.
void claim_output(const Context& ctx, const fs::path& path, bool directory) {
  if (!fs::exists(path)) {
    if (directory) fs::create_directories(path);
    return;
  }
  const bool occupied = fs::is_directory(path) ? !fs::is_empty(path) : true;
  if (occupied && !ctx.force) {
    throw Error("refusing to overwrite " + path.string() + " (pass --force)");
  }
  if (occupied) fs::remove_all(path);
  if (directory) fs::create_directories(path);
}

void copy_verbatim(const fs::path& from, const fs::path& to) {
  fs::create_directories(to.parent_path());
  fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

sim::SimConfig sim_config_from(const std::string& path) {
  return path.empty() ? sim::SimConfig{} : sim::load_sim_config(path);
}

struct CalibrateArgs {
  std::string samples, out;
};

void cmd_calibrate(const Context& ctx, const CalibrateArgs& a) {
  const auto samples = haptics::read_gauge_csv(a.samples);
  haptics::HapticsConfig cfg;
  cfg.calibration = haptics::fit_calibration(samples);
  claim_output(ctx, a.out, false);
  if (!fs::path(a.out).parent_path().empty()) fs::create_directories(fs::path(a.out).parent_path());
  haptics::save_haptics_config(cfg, a.out);
  json fingers = json::object();
  for (auto f : haptics::kAllFingers) {
    const auto& c = cfg.calibration[f];
    fingers[std::string(haptics::finger_name(f))] = {c.a, c.b, c.c, c.d};
  }
  ctx.info("wrote calibration for " + std::to_string(samples.size()) + " samples to " + a.out,
           {{"out", a.out}, {"samples", samples.size()}, {"coefficients", fingers}});
}

struct CollectArgs {
  int episodes = 50;
  std::uint64_t seed = 0;
  int horizon = data::kDefaultHorizon;
  std::string out, sim_config;
};

void cmd_collect(const Context& ctx, const CollectArgs& a) {
  if (a.episodes <= 0) throw UsageError("--episodes must be > 0");
  const auto cfg = sim_config_from(a.sim_config);
  claim_output(ctx, a.out, true);
  const sim::Simulator simulator(cfg);
  const auto summary = data::collect_scripted(simulator, a.out, a.episodes, a.seed, a.horizon);
  ctx.info("collected " + std::to_string(summary.kept_seeds.size()) + " episodes (" +
               std::to_string(summary.failed_seeds.size()) + " failed seeds) into " + a.out,
           {{"out", a.out},
            {"episodes", summary.kept_seeds.size()},
            {"attempted", summary.attempted},
            {"failed_seeds", summary.failed_seeds}});
}

struct TrainArgs {
  std::string data, out, config, haptics = "on", resume, lr_schedule;
  int steps = 0, batch_size = 0, chunk_size = 0, log_interval = 0;
  double lr = 0.0, beta = -1.0;
  std::int64_t seed = -1;
};

void cmd_train(const Context& ctx, const TrainArgs& a) {
  train::RunConfig rc = a.config.empty() ? train::RunConfig{} : train::load_run_config(a.config);
  if (a.haptics != "on" && a.haptics != "off") throw UsageError("--haptics must be on or off");
  rc.model.use_haptics = a.haptics == "on";
  if (a.steps > 0) rc.train.steps = a.steps;
  if (a.batch_size > 0) rc.train.batch_size = a.batch_size;
  if (a.chunk_size > 0) rc.model.chunk_size = a.chunk_size;
  if (a.log_interval > 0) rc.train.log_interval = a.log_interval;
  if (a.lr > 0.0) rc.train.learning_rate = a.lr;
  if (!a.lr_schedule.empty()) rc.train.lr_schedule = a.lr_schedule;
  if (a.beta >= 0.0) rc.train.beta = a.beta;
  if (a.seed >= 0) rc.train.seed = static_cast<std::uint64_t>(a.seed);

  auto episodes = train::load_named_episodes(a.data);
  const auto& first = episodes.front().episode;
  rc.model.cameras.clear();
  for (const auto& c : first.cameras) rc.model.cameras.push_back(c.name);
  if (!first.cameras.empty()) {
    rc.model.image_height = first.cameras.front().height;
    rc.model.image_width = first.cameras.front().width;
  }

  std::optional<train::Trainer> trainer;
  if (a.resume.empty()) {
    claim_output(ctx, a.out, true);
    trainer.emplace(rc.model, rc.train, std::move(episodes), a.out);
  } else {
    fs::create_directories(a.out);
    trainer.emplace(train::Trainer::resume(a.resume, rc.model, rc.train, std::move(episodes), a.out));
  }
  fs::create_directories(fs::path(a.out) / "config");
  train::save_run_config(rc, fs::path(a.out) / "config" / "train_config.json");
  std::ofstream(fs::path(a.out) / "config" / "data_source.txt") << fs::absolute(a.data).string() << "\n";

  trainer->run([&](const train::TrainRecord& r) {
    ctx.info("step " + std::to_string(r.step) + " train_mse " + std::to_string(r.train_mse) +
                 " kl " + std::to_string(r.train_kl) + " val_mse " + std::to_string(*r.val_mse),
             train::to_json(r));
  });
  ctx.info("checkpoints written to " + a.out, {{"out", a.out}, {"steps", trainer->current_step()}});
}

struct EvalArgs {
  std::string checkpoint, out, sim_config;
  int episodes = 20, horizon = 400;
  std::uint64_t seed = 1000;
  bool temporal_aggregation = false;
};

void cmd_eval(const Context& ctx, const EvalArgs& a) {
  if (a.episodes <= 0) throw UsageError("--episodes must be > 0");
  auto policy = eval::Policy::load(a.checkpoint);
  sim::SimConfig cfg = sim_config_from(a.sim_config);
  const sim::Simulator simulator(cfg);
  claim_output(ctx, a.out, true);
  eval::RolloutConfig rc;
  rc.horizon = a.horizon;
  rc.temporal_aggregation = a.temporal_aggregation;

  std::vector<std::string> files;
  json per_episode = json::array();
  int successes = 0;
  for (int i = 0; i < a.episodes; ++i) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    const auto r = eval::rollout(policy, simulator, seed, rc);
    files.push_back(data::episode_file_name(i));
    data::write_episode(r.episode, fs::path(a.out) / files.back());
    successes += r.success;
    per_episode.push_back({{"file", files.back()}, {"seed", seed}, {"success", r.success}});
    ctx.info("episode " + std::to_string(i) + " seed " + std::to_string(seed) +
                 (r.success ? " success" : " failure"),
             per_episode.back());
  }
  data::write_manifest(a.out, files);
  const json summary = {{"checkpoint", fs::absolute(a.checkpoint).string()},
                        {"episodes", a.episodes},
                        {"successes", successes},
                        {"success_rate", double(successes) / a.episodes},
                        {"temporal_aggregation", a.temporal_aggregation},
                        {"rollouts", per_episode}};
  std::ofstream(fs::path(a.out) / "eval.json") << summary.dump(2) << "\n";
  ctx.info("success " + std::to_string(successes) + "/" + std::to_string(a.episodes),
           {{"successes", successes}, {"episodes", a.episodes}, {"out", a.out}});
}

struct TeleopArgs {
  std::uint16_t port = 8765;
  double rate_hz = 15.0;
  std::string out, calib, sim_config, address = "127.0.0.1";
  std::uint64_t seed = 0;
  int ticks = 120;
};

void cmd_teleop_serve(const Context& ctx, const TeleopArgs& a) {
  if (!(a.rate_hz > 0.0)) throw UsageError("--rate-hz must be > 0");
  const sim::Simulator simulator(sim_config_from(a.sim_config));
  const auto haptics_cfg = a.calib.empty() ? haptics::HapticsConfig{} : haptics::load_haptics_config(a.calib);
  fs::create_directories(a.out);

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  teleop::SessionConfig session;
  session.rate_hz = a.rate_hz;
  session.out_dir = a.out;
  session.seed = a.seed;
  teleop::TeleopServer server(simulator, haptics_cfg, session, {a.address, a.port});
  server.start();
  ctx.info("teleop listening on ws://" + a.address + ":" + std::to_string(server.port()) + "/teleop",
           {{"port", server.port()}, {"rate_hz", a.rate_hz}, {"out", a.out}});
  int received = 0;
  sigwait(&signals, &received);
  server.stop();
  const auto stats = server.stats();
  ctx.info("teleop stopped; " + std::to_string(stats.saved_episodes) + " episodes saved",
           {{"states_sent", stats.states_sent},
            {"commands", stats.commands},
            {"errors", stats.errors},
            {"rejected_clients", stats.rejected_clients}});
}

void cmd_teleop_script(const Context& ctx, const TeleopArgs& a) {
  if (a.ticks <= 0) throw UsageError("--ticks must be > 0");
  const sim::Simulator simulator(sim_config_from(a.sim_config));
  const auto lines = teleop::scripted_command_log(simulator, a.seed, a.rate_hz, a.ticks);
  claim_output(ctx, a.out, false);
  if (!fs::path(a.out).parent_path().empty()) fs::create_directories(fs::path(a.out).parent_path());
  std::ofstream f(a.out);
  for (const auto& line : lines) f << line << "\n";
  if (!f) throw Error("cannot write " + a.out);
  ctx.info("wrote " + std::to_string(lines.size()) + " commands to " + a.out,
           {{"out", a.out}, {"lines", lines.size()}});
}

struct ReportArgs {
  std::string a, b, demos, out, label_a = "haptic-act", label_b = "act";
};

void cmd_report(const Context& ctx, const ReportArgs& r) {
  const auto run_a = eval::load_run_set(r.label_a, r.a);
  const auto run_b = eval::load_run_set(r.label_b, r.b);
  const auto demos = eval::load_run_set("demos", r.demos);
  claim_output(ctx, r.out, true);
  const auto files = eval::compare_report(run_a, run_b, demos, r.out);
  const auto s = json::parse(std::ifstream(files.summary));
  ctx.info("report written to " + r.out + " (force ratio " + s["force_ratio"].dump() + ")",
           {{"out", r.out}, {"force_ratio", s["force_ratio"]}, {"summary", files.summary.string()}});
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;

  CLI::App app{"Haptic-ACT desk-scale workbench", "hact"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", ctx.json_mode, "Machine-readable output and diagnostics");
  app.add_flag("--force", ctx.force, "Overwrite existing outputs");

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Motor-to-force calibration");
  calibrate->require_subcommand(1);
  auto* fit = calibrate->add_subcommand("fit", "Fit per-finger cubics to gauge samples");
  fit->add_option("--samples", cal.samples, "Gauge CSV (finger,motor_value,force_n)")->required();
  fit->add_option("--out", cal.out, "Output calib.json")->required();

  CollectArgs col;
  auto* collect = app.add_subcommand("collect", "Record demonstrations");
  collect->require_subcommand(1);
  auto* scripted = collect->add_subcommand("scripted", "Scripted soft-grasp demonstrations");
  scripted->add_option("--episodes", col.episodes, "Successful episodes to keep")->required();
  scripted->add_option("--seed", col.seed, "First seed")->required();
  scripted->add_option("--out", col.out, "Dataset directory")->required();
  scripted->add_option("--horizon", col.horizon, "Steps per episode");
  scripted->add_option("--sim-config", col.sim_config, "simconfig.json");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a policy");
  train_cmd->add_option("--data", tr.data, "Dataset directory")->required();
  train_cmd->add_option("--out", tr.out, "Run directory for logs and checkpoints")->required();
  train_cmd->add_option("--haptics", tr.haptics, "on: Haptic-ACT, off: ACT baseline")
      ->check(CLI::IsMember({"on", "off"}));
  train_cmd->add_option("--config", tr.config, "train_config.json");
  train_cmd->add_option("--steps", tr.steps, "Total optimizer steps");
  train_cmd->add_option("--batch-size", tr.batch_size);
  train_cmd->add_option("--chunk-size", tr.chunk_size);
  train_cmd->add_option("--lr", tr.lr);
  train_cmd->add_option("--lr-schedule", tr.lr_schedule, "constant or cosine")
      ->check(CLI::IsMember({"constant", "cosine"}));
  train_cmd->add_option("--beta", tr.beta);
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--log-interval", tr.log_interval);
  train_cmd->add_option("--resume", tr.resume, "Checkpoint to continue from");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Roll out a checkpoint in the simulator");
  eval_cmd->add_option("--checkpoint", ev.checkpoint)->required();
  eval_cmd->add_option("--episodes", ev.episodes)->required();
  eval_cmd->add_option("--seed", ev.seed, "First rollout seed");
  eval_cmd->add_option("--out", ev.out, "Directory for rollout episodes")->required();
  eval_cmd->add_option("--horizon", ev.horizon);
  eval_cmd->add_option("--sim-config", ev.sim_config);
  eval_cmd->add_flag("--temporal-aggregation", ev.temporal_aggregation);

  TeleopArgs tel;
  auto* teleop_cmd = app.add_subcommand("teleop", "Teleoperated demonstration collection");
  teleop_cmd->require_subcommand(1);
  auto* serve = teleop_cmd->add_subcommand("serve", "WebSocket teleop server at /teleop");
  serve->add_option("--port", tel.port, "TCP port (0 picks a free one)");
  serve->add_option("--rate-hz", tel.rate_hz, "State emission and recording rate");
  serve->add_option("--out", tel.out, "Dataset directory for recorded episodes")->required();
  serve->add_option("--calib", tel.calib, "calib.json with duty parameters");
  serve->add_option("--sim-config", tel.sim_config);
  serve->add_option("--seed", tel.seed, "Initial reset seed");
  serve->add_option("--address", tel.address, "Listen address");
  auto* script = teleop_cmd->add_subcommand("script", "Write a pick-and-place command log");
  script->add_option("--seed", tel.seed)->required();
  script->add_option("--out", tel.out, "Output .jsonl")->required();
  script->add_option("--rate-hz", tel.rate_hz);
  script->add_option("--ticks", tel.ticks, "Jog commands between record start and stop");
  script->add_option("--sim-config", tel.sim_config);

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Analysis reports");
  report->require_subcommand(1);
  auto* compare = report->add_subcommand("compare", "A/B force and joint-trace comparison");
  compare->add_option("--a", rep.a, "Rollout directory of run A")->required();
  compare->add_option("--b", rep.b, "Rollout directory of run B")->required();
  compare->add_option("--demos", rep.demos, "Demonstration dataset")->required();
  compare->add_option("--out", rep.out, "Report directory")->required();
  compare->add_option("--label-a", rep.label_a);
  compare->add_option("--label-b", rep.label_b);

  auto diagnose = [&](const std::string& level, const std::string& msg) {
    if (ctx.json_mode) {
      err << json{{"level", level}, {"message", msg}}.dump() << "\n";
    } else {
      err << level << ": " << msg << "\n";
    }
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    diagnose("usage", e.what());
    err << app.help();
    return kExitUsage;
  }

  try {
    if (fit->parsed()) cmd_calibrate(ctx, cal);
    else if (scripted->parsed()) cmd_collect(ctx, col);
    else if (train_cmd->parsed()) cmd_train(ctx, tr);
    else if (eval_cmd->parsed()) cmd_eval(ctx, ev);
    else if (compare->parsed()) cmd_report(ctx, rep);
    else if (serve->parsed()) cmd_teleop_serve(ctx, tel);
    else if (script->parsed()) cmd_teleop_script(ctx, tel);
  } catch (const UsageError& e) {
    diagnose("usage", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    diagnose("error", e.what());
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace hact::console
