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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hact/error.hpp"

namespace hact::teleop {

inline constexpr int kProtocolVersion = 1;
inline constexpr double kMaxTranslationStep = 0.05;  // m per cmd message

// Malformed or out-of-bounds client message. The session answers with an
// error frame and keeps running.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

struct HelloMsg {
  int version = kProtocolVersion;
};

struct CmdMsg {
  std::array<double, 3> dpos{};     // m
  std::array<double, 3> drot{};     // roll, pitch, yaw deltas, rad
  std::array<double, 6> closure{};  // hand joints, 0 open .. 1 closed
};

enum class RecordAction { kStart, kStop, kDiscard };

struct RecordMsg {
  RecordAction action = RecordAction::kStart;
};

struct ResetMsg {
  std::uint64_t seed = 0;
};

struct PingMsg {};

using ClientMessage = std::variant<HelloMsg, CmdMsg, RecordMsg, ResetMsg, PingMsg>;

// Throws ProtocolError with a readable reason.
ClientMessage parse_client_message(const std::string& text);
std::string to_text(const ClientMessage& message);

struct StateMsg {
  std::int64_t step = 0;
  std::vector<std::pair<std::string, std::string>> frames;  // camera, base64 PNG
  std::array<double, 13> joints{};
  std::array<double, 5> forces{};
  std::array<double, 5> duty{};
  bool recording = false;
  std::optional<int> episode_id;
};

nlohmann::json to_json(const StateMsg& state);
StateMsg state_from_json(const nlohmann::json& j);

std::string hello_text();
std::string error_text(const std::string& message);
std::string busy_text();

}  // namespace hact::teleop
