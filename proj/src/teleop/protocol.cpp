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

#include "hact/teleop/protocol.hpp"

#include <cmath>

namespace hact::teleop {

using nlohmann::json;

namespace {

template <std::size_t N>
std::array<double, N> finite_array(const json& j, const char* key) {
  if (!j.contains(key)) throw ProtocolError(std::string("cmd is missing '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != N) {
    throw ProtocolError(std::string("'") + key + "' must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw ProtocolError(std::string("'") + key + "' must contain numbers");
    out[i] = v[i].get<double>();
    if (!std::isfinite(out[i])) throw ProtocolError(std::string("'") + key + "' must be finite");
  }
  return out;
}

}  // namespace

ClientMessage parse_client_message(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw ProtocolError("message is not valid JSON");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ProtocolError("message needs a string 'type'");
  }
  const auto type = j["type"].get<std::string>();
  if (type == "hello") {
    if (!j.contains("version") || !j["version"].is_number_integer()) {
      throw ProtocolError("hello needs an integer 'version'");
    }
    return HelloMsg{j["version"].get<int>()};
  }
  if (type == "cmd") {
    CmdMsg c;
    c.dpos = finite_array<3>(j, "dpos");
    c.drot = finite_array<3>(j, "drot");
    c.closure = finite_array<6>(j, "closure");
    for (double d : c.dpos) {
      if (std::abs(d) > kMaxTranslationStep) throw ProtocolError("dpos component exceeds 0.05 m");
    }
    for (double c01 : c.closure) {
      if (c01 < 0.0 || c01 > 1.0) throw ProtocolError("closure values must be within [0, 1]");
    }
    return c;
  }
  if (type == "record") {
    const auto action = j.value("action", std::string());
    if (action == "start") return RecordMsg{RecordAction::kStart};
    if (action == "stop") return RecordMsg{RecordAction::kStop};
    if (action == "discard") return RecordMsg{RecordAction::kDiscard};
    throw ProtocolError("record action must be start, stop or discard");
  }
  if (type == "reset") {
    if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
      throw ProtocolError("reset needs a non-negative integer 'seed'");
    }
    return ResetMsg{j["seed"].get<std::uint64_t>()};
  }
  if (type == "ping") return PingMsg{};
  throw ProtocolError("unknown message type '" + type + "'");
}

std::string to_text(const ClientMessage& message) {
  struct Visitor {
    json operator()(const HelloMsg& m) const { return {{"type", "hello"}, {"version", m.version}}; }
    json operator()(const CmdMsg& m) const {
      return {{"type", "cmd"}, {"dpos", m.dpos}, {"drot", m.drot}, {"closure", m.closure}};
    }
    json operator()(const RecordMsg& m) const {
      const char* a = m.action == RecordAction::kStart ? "start"
                      : m.action == RecordAction::kStop ? "stop"
                                                         : "discard";
      return {{"type", "record"}, {"action", a}};
    }
    json operator()(const ResetMsg& m) const { return {{"type", "reset"}, {"seed", m.seed}}; }
    json operator()(const PingMsg&) const { return {{"type", "ping"}}; }
  };
  return std::visit(Visitor{}, message).dump();
}

json to_json(const StateMsg& s) {
  json frames = json::object();
  for (const auto& [cam, png] : s.frames) frames[cam] = png;
  return {{"type", "state"},
          {"step", s.step},
          {"frames", frames},
          {"joints", s.joints},
          {"forces", s.forces},
          {"duty", s.duty},
          {"recording", s.recording},
          {"episode_id", s.episode_id ? json(*s.episode_id) : json(nullptr)}};
}

StateMsg state_from_json(const json& j) {
  StateMsg s;
  s.step = j.at("step").get<std::int64_t>();
  for (const auto& [cam, png] : j.at("frames").items()) s.frames.emplace_back(cam, png.get<std::string>());
  s.joints = j.at("joints").get<std::array<double, 13>>();
  s.forces = j.at("forces").get<std::array<double, 5>>();
  s.duty = j.at("duty").get<std::array<double, 5>>();
  s.recording = j.at("recording").get<bool>();
  if (!j.at("episode_id").is_null()) s.episode_id = j.at("episode_id").get<int>();
  return s;
}

std::string hello_text() { return json{{"type", "hello"}, {"version", kProtocolVersion}}.dump(); }

std::string error_text(const std::string& message) {
  return json{{"type", "error"}, {"message", message}}.dump();
}

std::string busy_text() {
  return json{{"type", "busy"}, {"message", "another session is active"}}.dump();
}

}  // namespace hact::teleop
