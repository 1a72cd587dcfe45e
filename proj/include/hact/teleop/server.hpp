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

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "hact/haptics.hpp"
#include "hact/simworld/sim.hpp"
#include "hact/teleop/session.hpp"

namespace hact::teleop {

struct ServerConfig {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
};

struct ServerStats {
  std::int64_t states_sent = 0;
  std::int64_t commands = 0;
  std::int64_t errors = 0;
  std::int64_t rejected_clients = 0;
  int saved_episodes = 0;
};

// WebSocket front end for a TeleopSession at /teleop. One thread does all
// socket I/O; a second thread owns the session and works through incoming
// messages in order. Only one client at a time is served; later ones get a
// busy message and are closed.
class TeleopServer {
 public:
  TeleopServer(const sim::Simulator& sim, haptics::HapticsConfig haptics, SessionConfig session,
               ServerConfig server = {});
  ~TeleopServer();

  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  // Binds and starts both threads. Throws Error if the port is taken.
  void start();
  void stop();

  std::uint16_t port() const;
  ServerStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hact::teleop
