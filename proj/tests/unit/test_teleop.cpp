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

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include <gtest/gtest.h>

#include "hact/datastore/episode.hpp"
#include "hact/datastore/manifest.hpp"
#include "hact/haptics.hpp"
#include "hact/teleop/client.hpp"
#include "hact/teleop/image_codec.hpp"
#include "hact/teleop/script.hpp"
#include "hact/teleop/server.hpp"
#include "hact/teleop/session.hpp"

namespace hact::teleop {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hact_teleop_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> fixture_log() {
  std::ifstream in(fs::path(HACT_FIXTURE_DIR) / "teleop_commands.jsonl");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

const sim::Simulator& simulator() {
  static const sim::Simulator s{sim::SimConfig{}};
  return s;
}

// Independent restatement of the duty map: square root of the normalized force, clamped.
double duty_oracle(double force, double m, double n) {
  return std::sqrt(std::clamp((force - m) / n, 0.0, 1.0));
}

TEST(Schedule, FiftyOverFifteenRepeatsThreeThreeFour) {
  const auto s = substep_schedule(50.0, 15.0, 15);
  EXPECT_EQ(std::accumulate(s.begin(), s.end(), 0), 50);
  EXPECT_EQ(std::vector<int>(s.begin(), s.begin() + 6), (std::vector<int>{3, 3, 4, 3, 3, 4}));
}

TEST(Protocol, RejectsMalformedAndOutOfRangeMessages) {
  EXPECT_THROW(parse_client_message("{not json"), ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"jump"})"), ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"cmd","dpos":[0.06,0,0],"drot":[0,0,0],"closure":[0,0,0,0,0,0]})"),
               ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"cmd","dpos":[0,0,0],"drot":[0,0,0],"closure":[0,0,1.2,0,0,0]})"),
               ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"cmd","dpos":[0,0],"drot":[0,0,0],"closure":[0,0,0,0,0,0]})"),
               ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"record","action":"pause"})"), ProtocolError);
}

TEST(Protocol, TextRoundTrip) {
  CmdMsg cmd;
  cmd.dpos = {0.01, -0.02, 0.05};
  cmd.drot = {0.1, 0.0, -0.3};
  cmd.closure = {0, 0.25, 0.5, 0.75, 1.0, 0.1};
  const auto back = std::get<CmdMsg>(parse_client_message(to_text(cmd)));
  EXPECT_EQ(back.dpos, cmd.dpos);
  EXPECT_EQ(back.drot, cmd.drot);
  EXPECT_EQ(back.closure, cmd.closure);
  EXPECT_EQ(std::get<ResetMsg>(parse_client_message(to_text(ResetMsg{42}))).seed, 42u);
  EXPECT_EQ(std::get<RecordMsg>(parse_client_message(to_text(RecordMsg{RecordAction::kDiscard}))).action,
            RecordAction::kDiscard);
  EXPECT_EQ(json::parse(hello_text()), (json{{"type", "hello"}, {"version", 1}}));
}

TEST(ImageCodec, PngAndBase64RoundTrip) {
  EXPECT_EQ(base64_encode({'h', 'e', 'l', 'l', 'o'}), "aGVsbG8=");
  const auto decoded = base64_decode("aGVsbG8=");
  EXPECT_EQ(std::string(decoded.begin(), decoded.end()), "hello");

  const auto image = sim::render(simulator(), simulator().reset(3), sim::Camera::kFront);
  const auto png = encode_png(image);
  ASSERT_GT(png.size(), 8u);
  EXPECT_EQ(png[1], 'P');
  EXPECT_EQ(decode_png(base64_decode(base64_encode(png))), image);
}

TEST(Session, ZeroDeltaStreamIsIdle) {
  TeleopSession session(simulator(), {}, {});
  const auto start = session.state().joints();
  CmdMsg idle;
  for (int i = 0; i < 30; ++i) {
    const auto s = session.apply(idle);
    for (int f = 0; f < 5; ++f) {
      EXPECT_EQ(s.forces[f], 0.0);
      EXPECT_EQ(s.duty[f], 0.0);
    }
  }
  // Targets pass through float32, so the hold drifts by at most its rounding.
  EXPECT_LT((session.state().joints() - start).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(session.state().step, 100);
}

TEST(Session, UnreachableTargetLeavesStateUntouched) {
  TeleopSession session(simulator(), {}, {});
  for (int i = 0; i < 40; ++i) {
    CmdMsg far;
    far.dpos = {0.05, 0.0, 0.0};
    try {
      session.apply(far);
    } catch (const ProtocolError& e) {
      const auto before = session.state();
      EXPECT_THROW(session.apply(far), ProtocolError);
      EXPECT_EQ(session.state().step, before.step);
      EXPECT_NE(std::string(e.what()).find("unreachable"), std::string::npos);
      return;
    }
  }
  FAIL() << "target never left the workspace";
}

TEST(Session, ClosureRampOnBlockRaisesDutyWithForce) {
  const haptics::DutyParams duty{};
  TeleopSession session(simulator(), {}, {});
  const auto lines = fixture_log();
  // Jog until the fingers start closing, i.e. the hand is around the block.
  std::array<double, 6> closure{};
  for (const auto& line : lines) {
    const auto msg = parse_client_message(line);
    const auto* cmd = std::get_if<CmdMsg>(&msg);
    if (!cmd) continue;
    if (cmd->closure[2] > 0.0) {
      closure = cmd->closure;
      break;
    }
    session.apply(*cmd);
  }
  std::vector<StateMsg> states;
  CmdMsg ramp;
  ramp.closure = closure;
  for (int i = 0; i < 40; ++i) {
    for (int j = 1; j < 6; ++j) ramp.closure[j] = std::min(1.0, ramp.closure[j] + 0.01);
    states.push_back(session.apply(ramp));
  }
  int rising = 0;
  const double cap = simulator().config().force_cap;
  for (std::size_t t = 0; t < states.size(); ++t) {
    for (int f = 0; f < 5; ++f) {
      EXPECT_EQ(states[t].duty[f], duty_oracle(states[t].forces[f], duty.m, duty.n));
      if (t == 0) continue;
      const double prev = states[t - 1].forces[f];
      if (prev > 0.0 && prev < cap) {
        EXPECT_GT(states[t].duty[f], states[t - 1].duty[f]) << "finger " << f << " t " << t;
        ++rising;
      }
    }
  }
  EXPECT_GT(rising, 10);
  EXPECT_TRUE(session.state().object_attached);
}

TEST(Session, ScriptedLogPicksAndPlaces) {
  const auto dir = scratch_dir("offline");
  SessionConfig cfg;
  cfg.out_dir = dir;
  TeleopSession session(simulator(), {}, cfg);
  json last;
  for (const auto& line : fixture_log()) {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, CmdMsg>) session.apply(m);
          if constexpr (std::is_same_v<T, ResetMsg>) session.reset(m.seed);
          if constexpr (std::is_same_v<T, RecordMsg>) last = session.record(m.action);
        },
        parse_client_message(line));
  }
  EXPECT_EQ(last["status"], "saved");
  EXPECT_TRUE(last["success"].get<bool>());
}

TEST(Session, RecordingNeedsStartAndDiscardDropsIt) {
  const auto dir = scratch_dir("discard");
  SessionConfig cfg;
  cfg.out_dir = dir;
  TeleopSession session(simulator(), {}, cfg);
  EXPECT_THROW(session.record(RecordAction::kStop), ProtocolError);
  session.record(RecordAction::kStart);
  session.apply(CmdMsg{});
  EXPECT_EQ(session.record(RecordAction::kDiscard)["status"], "discarded");
  EXPECT_EQ(session.saved_episodes(), 0);
  EXPECT_FALSE(fs::exists(dir / "dataset.json"));
}

class ServerTest : public ::testing::Test {
 protected:
  void start(const std::string& name, double rate_hz = 15.0) {
    dir_ = scratch_dir(name);
    SessionConfig cfg;
    cfg.out_dir = dir_;
    cfg.rate_hz = rate_hz;
    server_ = std::make_unique<TeleopServer>(simulator(), haptics::HapticsConfig{}, cfg);
    server_->start();
  }
  // The server notices a disconnect asynchronously; retry until it greets us.
  std::unique_ptr<TeleopClient> connect_when_free() {
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto client = std::make_unique<TeleopClient>("127.0.0.1", server_->port());
      if (client->receive()["type"] == "hello") return client;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    throw std::runtime_error("server stayed busy");
  }

  void TearDown() override {
    if (server_) server_->stop();
  }

  fs::path dir_;
  std::unique_ptr<TeleopServer> server_;
};

TEST_F(ServerTest, LoopbackRecordsReplayableEpisode) {
  start("loopback");
  TeleopClient client("127.0.0.1", server_->port());
  client.handshake();
  const auto lines = fixture_log();
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = run_command_log(client, lines);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  EXPECT_EQ(result.errors, 0);
  ASSERT_EQ(result.states.size(), lines.size() - 2);
  // Emission rate: n states need at least (n - 2) periods (one of jitter).
  EXPECT_GE(elapsed, (static_cast<double>(result.states.size()) - 2.0) / 15.0);

  const haptics::DutyParams duty{};
  for (const auto& s : result.states) {
    for (int f = 0; f < 5; ++f) ASSERT_EQ(s.duty[f], duty_oracle(s.forces[f], duty.m, duty.n));
    ASSERT_EQ(s.frames.size(), 2u);
  }
  const auto& saved = result.replies.back();
  ASSERT_EQ(saved["status"], "saved") << saved.dump();

  const auto manifest = data::load_manifest(dir_);
  ASSERT_EQ(manifest.files.size(), 1u);
  const auto episode = data::read_episode(dir_ / manifest.files[0]);
  episode.validate();
  EXPECT_EQ(episode.metadata.source, "teleop");
  EXPECT_DOUBLE_EQ(episode.metadata.rate_hz, 15.0);
  EXPECT_EQ(episode.length(), static_cast<std::int64_t>(lines.size() - 3));
  EXPECT_TRUE(episode.metadata.success);

  const auto replayed = replay_teleop_episode(simulator(), episode);
  EXPECT_EQ(replayed.joints, episode.joints);
  EXPECT_EQ(replayed.forces, episode.forces);
  EXPECT_EQ(replayed.actions, episode.actions);
  EXPECT_EQ(replayed.cameras, episode.cameras);
  EXPECT_EQ(replayed.metadata, episode.metadata);
}

TEST_F(ServerTest, MalformedMessageGetsErrorAndSessionContinues) {
  start("malformed", 200.0);
  TeleopClient client("127.0.0.1", server_->port());
  client.handshake();
  client.send_text("{\"type\":\"cmd\"");
  EXPECT_EQ(client.receive()["type"], "error");
  EXPECT_EQ(client.request(PingMsg{})["type"], "pong");
  EXPECT_EQ(client.request(CmdMsg{})["type"], "state");
}

TEST_F(ServerTest, SecondClientIsBusy) {
  start("busy", 200.0);
  TeleopClient first("127.0.0.1", server_->port());
  first.handshake();
  TeleopClient second("127.0.0.1", server_->port());
  EXPECT_EQ(second.receive()["type"], "busy");
  EXPECT_THROW(second.receive(), ProtocolError);
  EXPECT_EQ(first.request(PingMsg{})["type"], "pong");
  EXPECT_EQ(server_->stats().rejected_clients, 1);
}

TEST_F(ServerTest, SessionFreesUpAfterDisconnect) {
  start("reconnect", 200.0);
  {
    TeleopClient first("127.0.0.1", server_->port());
    first.handshake();
  }
  auto next = connect_when_free();
  next->send(HelloMsg{});
  EXPECT_EQ(next->receive()["type"], "state");
}

TEST_F(ServerTest, OnlyTeleopPathUpgrades) {
  start("path", 200.0);
  EXPECT_THROW(TeleopClient("127.0.0.1", server_->port(), "/other"), ProtocolError);
}

TEST_F(ServerTest, VersionMismatchIsRejected) {
  start("version", 200.0);
  TeleopClient client("127.0.0.1", server_->port());
  EXPECT_THROW(client.handshake(2), ProtocolError);
  EXPECT_THROW(client.receive(), ProtocolError);
}

TEST_F(ServerTest, DisconnectMidRecordingDiscards) {
  start("interrupted", 200.0);
  {
    TeleopClient client("127.0.0.1", server_->port());
    client.handshake();
    EXPECT_EQ(client.request(RecordMsg{RecordAction::kStart})["status"], "started");
    for (int i = 0; i < 5; ++i) client.request(CmdMsg{});
  }
  auto again = connect_when_free();
  again->send(HelloMsg{});
  EXPECT_FALSE(state_from_json(again->receive()).recording);
  EXPECT_EQ(again->request(RecordMsg{RecordAction::kStop})["type"], "error");
  EXPECT_FALSE(fs::exists(dir_ / "dataset.json"));
}

}  // namespace
}  // namespace hact::teleop
