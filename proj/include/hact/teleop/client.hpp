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

#include <json.hpp>

#include "hact/teleop/protocol.hpp"

namespace hact::teleop {

// Blocking WebSocket client for the teleop protocol. Used by tests, the
// loopback driver and anything else that wants to script a session.
class TeleopClient {
 public:
  TeleopClient(const std::string& host, std::uint16_t port, const std::string& path = "/teleop",
               std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~TeleopClient();

  TeleopClient(const TeleopClient&) = delete;
  TeleopClient& operator=(const TeleopClient&) = delete;

  void send_text(const std::string& text);
  void send(const ClientMessage& message) { send_text(to_text(message)); }

  // Next frame from the server. Throws ProtocolError on timeout or when the
  // connection has closed.
  nlohmann::json receive();

  // Waits for the server hello, answers with ours and returns the first state.
  StateMsg handshake(int version = kProtocolVersion);

  // Sends a message and returns the first reply frame.
  nlohmann::json request(const ClientMessage& message);

  bool is_open() const;
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Command-log driver: feeds each JSONL line to the server in order, waiting
// for the reply to each before sending the next.
struct LoopbackResult {
  std::vector<StateMsg> states;
  std::vector<nlohmann::json> replies;  // every non-state reply
  std::int64_t errors = 0;
};

LoopbackResult run_command_log(TeleopClient& client, const std::vector<std::string>& lines);

}  // namespace hact::teleop
