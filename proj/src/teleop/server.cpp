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

#include "hact/teleop/server.hpp"

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <variant>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace hact::teleop {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

namespace {

class Connection;

struct Event {
  enum class Kind { kOpen, kMessage, kClose } kind;
  std::shared_ptr<Connection> connection;
  std::string text;
};

// Callbacks the connection uses to reach the server.
struct Hub {
  std::function<bool(const std::shared_ptr<Connection>&)> claim;  // false when busy
  std::function<void(Event)> push;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Hub* hub) : ws_(std::move(socket)), hub_(hub) {}

  void start() {
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (!ec) self->on_request();
                     });
  }

  // Both must be called on the I/O thread.
  void send(std::string text) {
    if (closing_) return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write_next();
  }
  void close_after_writes() {
    close_requested_ = true;
    if (outbox_.empty()) do_close();
  }
  void abort() {
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
  }

 private:
  void on_request() {
    if (!websocket::is_upgrade(request_) || request_.target() != "/teleop") {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found,
                                                                     request_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
      res->prepare_payload();
      http::async_write(ws_.next_layer(), *res,
                        [self = shared_from_this(), res](beast::error_code, std::size_t) {
                          beast::error_code ec;
                          self->ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
                        });
      return;
    }
    ws_.text(true);
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      if (!self->hub_->claim(self)) {
        self->send(busy_text());
        self->close_after_writes();
        return;
      }
      self->hub_->push({Event::Kind::kOpen, self, {}});
      self->read_next();
    });
  }

  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closing_ = true;
        self->hub_->push({Event::Kind::kClose, self, {}});
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->hub_->push({Event::Kind::kMessage, self, std::move(text)});
      self->read_next();
    });
  }

  void write_next() {
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->outbox_.pop_front();
                      if (ec) {
                        self->outbox_.clear();
                        return;
                      }
                      if (!self->outbox_.empty()) {
                        self->write_next();
                      } else if (self->close_requested_) {
                        self->do_close();
                      }
                    });
  }

  void do_close() {
    if (close_sent_) return;
    close_sent_ = true;
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) {});
  }

  websocket::stream<tcp::socket> ws_;
  Hub* hub_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::deque<std::string> outbox_;
  bool close_requested_ = false;
  bool closing_ = false;
  bool close_sent_ = false;
};

}  // namespace

struct TeleopServer::Impl {
  Impl(const sim::Simulator& sim, haptics::HapticsConfig haptics, SessionConfig session_config,
       ServerConfig server_config)
      : session(sim, std::move(haptics), session_config),
        server(std::move(server_config)),
        period(std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(1.0 / session_config.rate_hz))),
        acceptor(ioc) {
    hub.claim = [this](const std::shared_ptr<Connection>& c) {
      std::lock_guard lock(mutex);
      if (active.lock()) {
        ++stats.rejected_clients;
        return false;
      }
      active = c;
      return true;
    };
    hub.push = [this](Event e) {
      {
        std::lock_guard lock(mutex);
        events.push_back(std::move(e));
      }
      cv.notify_one();
    };
  }

  // ---- I/O thread ----
  void do_accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(std::move(socket), &hub)->start();
      do_accept();
    });
  }

  // ---- stepper thread ----
  void post_send(const std::shared_ptr<Connection>& c, std::string text) {
    net::post(ioc, [c, t = std::move(text)]() mutable { c->send(std::move(t)); });
  }

  void send_state(const std::shared_ptr<Connection>& c, const StateMsg& s) {
    // Never faster than the configured rate.
    const auto now = Clock::now();
    if (next_emit > now) std::this_thread::sleep_until(next_emit);
    next_emit = std::max(Clock::now(), next_emit) + period;
    post_send(c, to_json(s).dump());
    std::lock_guard lock(mutex);
    ++stats.states_sent;
  }

  void send_error(const std::shared_ptr<Connection>& c, const std::string& message) {
    post_send(c, error_text(message));
    std::lock_guard lock(mutex);
    ++stats.errors;
  }

  void handle(const Event& e) {
    const auto& c = e.connection;
    switch (e.kind) {
      case Event::Kind::kOpen:
        handshake_done = false;
        post_send(c, hello_text());
        return;
      case Event::Kind::kClose: {
        session.abandon_recording();
        std::lock_guard lock(mutex);
        if (active.lock() == c) active.reset();
        return;
      }
      case Event::Kind::kMessage:
        break;
    }

    ClientMessage msg;
    try {
      msg = parse_client_message(e.text);
    } catch (const ProtocolError& err) {
      send_error(c, err.what());
      return;
    }
    if (!handshake_done) {
      const auto* hello = std::get_if<HelloMsg>(&msg);
      if (!hello) {
        send_error(c, "expected hello first");
        return;
      }
      if (hello->version != kProtocolVersion) {
        send_error(c, "unsupported protocol version " + std::to_string(hello->version));
        net::post(ioc, [c] { c->close_after_writes(); });
        return;
      }
      handshake_done = true;
      send_state(c, session.state_message());
      return;
    }

    try {
      std::visit(
          [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HelloMsg>) {
              send_error(c, "hello already received");
            } else if constexpr (std::is_same_v<T, CmdMsg>) {
              {
                std::lock_guard lock(mutex);
                ++stats.commands;
              }
              send_state(c, session.apply(m));
            } else if constexpr (std::is_same_v<T, RecordMsg>) {
              post_send(c, session.record(m.action).dump());
              std::lock_guard lock(mutex);
              stats.saved_episodes = session.saved_episodes();
            } else if constexpr (std::is_same_v<T, ResetMsg>) {
              send_state(c, session.reset(m.seed));
            } else {
              post_send(c, R"({"type":"pong"})");
            }
          },
          msg);
    } catch (const ProtocolError& err) {
      send_error(c, err.what());
    } catch (const Error& err) {
      send_error(c, std::string("simulator: ") + err.what());
    }
  }

  void stepper_loop() {
    for (;;) {
      Event e;
      {
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return stopping || !events.empty(); });
        if (stopping) return;
        e = std::move(events.front());
        events.pop_front();
      }
      handle(e);
    }
  }

  TeleopSession session;
  ServerConfig server;
  Clock::duration period;
  Clock::time_point next_emit{};
  bool handshake_done = false;

  net::io_context ioc;
  tcp::acceptor acceptor;
  Hub hub;
  std::thread io_thread;
  std::thread stepper_thread;

  mutable std::mutex mutex;
  std::condition_variable cv;
  std::deque<Event> events;
  std::weak_ptr<Connection> active;
  bool stopping = false;
  bool running = false;
  std::uint16_t bound_port = 0;
  ServerStats stats;
};

TeleopServer::TeleopServer(const sim::Simulator& sim, haptics::HapticsConfig haptics,
                           SessionConfig session, ServerConfig server)
    : impl_(std::make_unique<Impl>(sim, std::move(haptics), std::move(session), std::move(server))) {}

TeleopServer::~TeleopServer() { stop(); }

void TeleopServer::start() {
  if (impl_->running) return;
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->server.address, ec);
  if (ec) throw ConfigError("bad listen address: " + impl_->server.address);
  const tcp::endpoint endpoint(address, impl_->server.port);
  auto& acc = impl_->acceptor;
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error("cannot listen on " + impl_->server.address + ":" +
                std::to_string(impl_->server.port) + ": " + ec.message());
  }
  impl_->bound_port = acc.local_endpoint().port();
  impl_->running = true;
  impl_->do_accept();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
  impl_->stepper_thread = std::thread([this] { impl_->stepper_loop(); });
}

void TeleopServer::stop() {
  if (!impl_->running) return;
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->stepper_thread.join();
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    std::lock_guard lock(impl_->mutex);
    if (auto c = impl_->active.lock()) c->abort();
    impl_->ioc.stop();
  });
  impl_->io_thread.join();
  impl_->session.abandon_recording();
  impl_->running = false;
}

std::uint16_t TeleopServer::port() const { return impl_->bound_port; }

ServerStats TeleopServer::stats() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->stats;
}

}  // namespace hact::teleop
