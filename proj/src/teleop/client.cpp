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

#include "hact/teleop/client.hpp"

#include <optional>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace hact::teleop {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using json = nlohmann::json;

struct TeleopClient::Impl {
  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  std::chrono::milliseconds timeout;
  beast::flat_buffer buffer;
  bool open = false;

  // Runs the context until `done` is set or the timeout passes.
  void wait(const bool& done, const char* what) {
    ioc.restart();
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (!done && std::chrono::steady_clock::now() < deadline) {
      ioc.run_one_until(deadline);
    }
    if (!done) {
      beast::error_code ec;
      ws.next_layer().cancel(ec);
      ioc.restart();
      ioc.run_for(std::chrono::milliseconds(100));
      throw ProtocolError(std::string("timed out waiting for ") + what);
    }
  }
};

TeleopClient::TeleopClient(const std::string& host, std::uint16_t port, const std::string& path,
                           std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>()) {
  impl_->timeout = timeout;
  beast::error_code ec;
  tcp::resolver resolver(impl_->ioc);
  const auto results = resolver.resolve(host, std::to_string(port), ec);
  if (ec) throw ProtocolError("cannot resolve " + host + ": " + ec.message());
  net::connect(impl_->ws.next_layer(), results, ec);
  if (ec) throw ProtocolError("cannot connect to " + host + ":" + std::to_string(port) + ": " + ec.message());

  bool done = false;
  beast::error_code hs;
  impl_->ws.async_handshake(host, path, [&](beast::error_code e) {
    hs = e;
    done = true;
  });
  impl_->wait(done, "handshake");
  if (hs) throw ProtocolError("websocket handshake failed: " + hs.message());
  impl_->ws.text(true);
  impl_->open = true;
}

TeleopClient::~TeleopClient() {
  try {
    close();
  } catch (...) {
  }
}

void TeleopClient::send_text(const std::string& text) {
  if (!impl_->open) throw ProtocolError("connection closed");
  bool done = false;
  beast::error_code result;
  impl_->ws.async_write(net::buffer(text), [&](beast::error_code e, std::size_t) {
    result = e;
    done = true;
  });
  impl_->wait(done, "write");
  if (result) {
    impl_->open = false;
    throw ProtocolError("write failed: " + result.message());
  }
}

json TeleopClient::receive() {
  if (!impl_->open) throw ProtocolError("connection closed");
  bool done = false;
  beast::error_code result;
  impl_->ws.async_read(impl_->buffer, [&](beast::error_code e, std::size_t) {
    result = e;
    done = true;
  });
  impl_->wait(done, "server message");
  if (result) {
    impl_->open = false;
    throw ProtocolError("connection closed: " + result.message());
  }
  std::string text = beast::buffers_to_string(impl_->buffer.data());
  impl_->buffer.consume(impl_->buffer.size());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("server sent invalid JSON: ") + e.what());
  }
}

StateMsg TeleopClient::handshake(int version) {
  const json hello = receive();
  if (hello.value("type", "") != "hello") throw ProtocolError("expected hello, got " + hello.dump());
  if (hello.value("version", -1) != kProtocolVersion) {
    throw ProtocolError("server speaks protocol version " + hello["version"].dump());
  }
  send(HelloMsg{version});
  const json reply = receive();
  if (reply.value("type", "") != "state") throw ProtocolError(reply.value("message", reply.dump()));
  return state_from_json(reply);
}

json TeleopClient::request(const ClientMessage& message) {
  send(message);
  return receive();
}

bool TeleopClient::is_open() const { return impl_->open; }

void TeleopClient::close() {
  if (!impl_->open) return;
  impl_->open = false;
  bool done = false;
  impl_->ws.async_close(websocket::close_code::normal, [&](beast::error_code) { done = true; });
  try {
    impl_->wait(done, "close");
  } catch (const ProtocolError&) {
  }
}

LoopbackResult run_command_log(TeleopClient& client, const std::vector<std::string>& lines) {
  LoopbackResult out;
  for (const auto& line : lines) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    client.send_text(line);
    const json reply = client.receive();
    const auto type = reply.value("type", "");
    if (type == "state") {
      out.states.push_back(state_from_json(reply));
    } else {
      if (type == "error") ++out.errors;
      out.replies.push_back(reply);
    }
  }
  return out;
}

}  // namespace hact::teleop
