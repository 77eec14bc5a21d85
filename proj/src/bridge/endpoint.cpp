#include "minidrive/bridge/endpoint.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

namespace minidrive::bridge {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::string_view mime_type(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

bool is_ipv4_dotted_quad(std::string_view ip) {
  int parts = 0;
  std::size_t pos = 0;
  while (pos <= ip.size()) {
    const std::size_t dot = std::min(ip.find('.', pos), ip.size());
    const std::string_view part = ip.substr(pos, dot - pos);
    if (part.empty() || part.size() > 3) return false;
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size() || value > 255) {
      return false;
    }
    ++parts;
    pos = dot + 1;
  }
  return parts == 4;
}

void BridgeConfig::validate() const {
  if (!is_ipv4_dotted_quad(ip)) {
    throw std::invalid_argument("bridge: '" + ip + "' is not an IPv4 address");
  }
  if (port < 1 || port > 65535) {
    throw std::invalid_argument("bridge: port must be in [1, 65535]");
  }
}

BridgeConfig BridgeConfig::parse(std::string_view endpoint, Role role) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("bridge: expected <ip>:<port>, got '" +
                                std::string(endpoint) + "'");
  }
  BridgeConfig c;
  c.ip = std::string(endpoint.substr(0, colon));
  const std::string_view port = endpoint.substr(colon + 1);
  const auto [ptr, ec] =
      std::from_chars(port.data(), port.data() + port.size(), c.port);
  if (ec != std::errc() || ptr != port.data() + port.size()) {
    throw std::invalid_argument("bridge: bad port in '" +
                                std::string(endpoint) + "'");
  }
  c.role = role;
  c.validate();
  return c;
}

std::string_view to_string(ConnectionStatus status) {
  return status == ConnectionStatus::kConnected ? "Connected" : "Disconnected";
}

// ---------------------------------------------------------------------------

namespace detail {
class WsSession;
}  // namespace detail
using detail::WsSession;

struct Endpoint::Impl {
  Impl(BridgeConfig c, EndpointCallbacks cb, EndpointOptions o)
      : config(std::move(c)),
        callbacks(std::move(cb)),
        options(std::move(o)),
        backoff(options.retry_initial) {}

  void start();
  void stop();
  void do_accept();
  void dial();
  void schedule_retry();
  void add(const std::shared_ptr<WsSession>& s);
  void remove(const std::shared_ptr<WsSession>& s);
  void handshake_failed();
  void handle_frame(const std::string& text);
  void broadcast(std::string frame);

  BridgeConfig config;
  EndpointCallbacks callbacks;
  EndpointOptions options;

  asio::io_context ioc;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>>
      work;
  std::thread thread;
  tcp::acceptor acceptor{ioc};
  asio::steady_timer retry_timer{ioc};
  std::chrono::milliseconds backoff;

  // Touched only on the network thread.
  std::set<std::shared_ptr<WsSession>> sessions;
  bool stopping = false;

  std::atomic<std::size_t> peers{0};
  std::atomic<std::uint64_t> dials{0};
  std::atomic<std::uint64_t> malformed{0};
  std::atomic<std::uint16_t> bound_port{0};
};

namespace detail {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(Endpoint::Impl& owner, beast::tcp_stream&& stream)
      : owner_(owner), ws_(std::move(stream)) {}

  void accept(http::request<http::string_body> req) {
    ws_.set_option(
        websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_open,
                                                    shared_from_this()));
  }

  void handshake(const std::string& host) {
    ws_.set_option(
        websocket::stream_base::timeout::suggested(beast::role_type::client));
    ws_.async_handshake(host, "/",
                        beast::bind_front_handler(&WsSession::on_open,
                                                  shared_from_this()));
  }

  void send(const std::shared_ptr<const std::string>& frame) {
    if (closed_) return;
    outbox_.push_back(frame);
    // Slow peer: drop the oldest queued frames, never the one in flight.
    while (outbox_.size() > owner_.options.max_backlog) {
      outbox_.erase(writing_ ? std::next(outbox_.begin()) : outbox_.begin());
    }
    if (!writing_) write();
  }

  void close() {
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void on_open(beast::error_code ec) {
    if (ec) {
      spdlog::debug("bridge: websocket handshake failed: {}", ec.message());
      if (owner_.config.role == Role::kConnect) owner_.handshake_failed();
      return;
    }
    ws_.text(true);
    owner_.add(shared_from_this());
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read,
                                                      shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      owner_.remove(shared_from_this());
      return;
    }
    if (ws_.got_text()) {
      owner_.handle_frame(beast::buffers_to_string(buffer_.data()));
    } else {
      ++owner_.malformed;
      spdlog::warn("bridge: ignoring binary frame");
    }
    buffer_.consume(buffer_.size());
    read();
  }

  void write() {
    writing_ = true;
    ws_.async_write(asio::buffer(*outbox_.front()),
                    beast::bind_front_handler(&WsSession::on_write,
                                              shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) return;  // the pending read reports the failure
    outbox_.pop_front();
    if (!outbox_.empty() && !closed_) write();
  }

  Endpoint::Impl& owner_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  bool writing_ = false;
  bool closed_ = false;
};

// Plain HTTP on the listen port: websocket upgrade, /map, UI assets.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(Endpoint::Impl& owner, tcp::socket&& socket)
      : owner_(owner), stream_(std::move(socket)) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpSession::on_read,
                                               shared_from_this()));
  }

 private:
  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<WsSession>(owner_, std::move(stream_))
          ->accept(std::move(req_));
      return;
    }
    respond();
  }

  void respond() {
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(false);
    res->set(http::field::server, "minidrive");
    res->set(http::field::access_control_allow_origin, "*");

    const std::string target(req_.target());
    const auto body = resolve(target);
    if (req_.method() != http::verb::get || !body) {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    } else {
      res->result(http::status::ok);
      res->set(http::field::content_type, body->second);
      res->body() = std::move(body->first);
    }
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code,
                                                       std::size_t) {
                        beast::error_code ignored;
                        self->stream_.socket().shutdown(
                            tcp::socket::shutdown_send, ignored);
                      });
  }

  std::optional<std::pair<std::string, std::string>> resolve(
      std::string target) const {
    if (const auto q = target.find('?'); q != std::string::npos) {
      target.resize(q);
    }
    if (target == "/map") {
      if (owner_.options.map_json.empty()) return std::nullopt;
      return std::pair{owner_.options.map_json, std::string("application/json")};
    }
    if (owner_.options.ui_dir.empty() || target.empty() || target[0] != '/' ||
        target.find("..") != std::string::npos) {
      return std::nullopt;
    }
    if (target.back() == '/') target += "index.html";
    const std::filesystem::path path =
        std::filesystem::path(owner_.options.ui_dir) / target.substr(1);
    auto content = read_file(path);
    if (!content) return std::nullopt;
    return std::pair{std::move(*content), std::string(mime_type(path))};
  }

  Endpoint::Impl& owner_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace detail

using detail::HttpSession;

// ---------------------------------------------------------------------------

void Endpoint::Impl::start() {
  config.validate();
  work.emplace(asio::make_work_guard(ioc));
  if (config.role == Role::kListen) {
    const tcp::endpoint at(asio::ip::make_address(config.ip),
                           static_cast<std::uint16_t>(config.port));
    acceptor.open(at.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(at);
    acceptor.listen(asio::socket_base::max_listen_connections);
    bound_port = acceptor.local_endpoint().port();
    do_accept();
  } else {
    asio::post(ioc, [this] { dial(); });
  }
  thread = std::thread([this] { ioc.run(); });
}

void Endpoint::Impl::stop() {
  if (!thread.joinable()) return;
  asio::post(ioc, [this] {
    stopping = true;
    beast::error_code ignored;
    acceptor.close(ignored);
    retry_timer.cancel();
    for (const auto& s : sessions) s->close();
    sessions.clear();
    peers = 0;
    ioc.stop();
  });
  work.reset();
  thread.join();
}

void Endpoint::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (!stopping && ec != asio::error::operation_aborted) {
        spdlog::warn("bridge: accept failed: {}", ec.message());
        do_accept();
      }
      return;
    }
    std::make_shared<HttpSession>(*this, std::move(socket))->run();
    do_accept();
  });
}

void Endpoint::Impl::dial() {
  if (stopping) return;
  ++dials;
  auto stream = std::make_shared<beast::tcp_stream>(ioc);
  const tcp::endpoint at(asio::ip::make_address(config.ip),
                         static_cast<std::uint16_t>(config.port));
  stream->expires_after(std::chrono::seconds(5));
  stream->async_connect(at, [this, stream](beast::error_code ec) {
    if (ec) {
      spdlog::debug("bridge: dial {}:{} failed: {}", config.ip, config.port,
                    ec.message());
      schedule_retry();
      return;
    }
    stream->expires_never();
    std::make_shared<WsSession>(*this, std::move(*stream))
        ->handshake(config.ip + ":" + std::to_string(config.port));
  });
}

void Endpoint::Impl::schedule_retry() {
  if (stopping || config.role != Role::kConnect) return;
  retry_timer.expires_after(backoff);
  backoff = std::min(backoff * 2, options.retry_max);
  retry_timer.async_wait([this](beast::error_code ec) {
    if (!ec) dial();
  });
}

void Endpoint::Impl::handshake_failed() { schedule_retry(); }

void Endpoint::Impl::add(const std::shared_ptr<WsSession>& s) {
  if (stopping) {
    s->close();
    return;
  }
  sessions.insert(s);
  peers = sessions.size();
  backoff = options.retry_initial;
  spdlog::info("bridge: peer connected ({} total)", sessions.size());
  if (callbacks.on_peer_connected) callbacks.on_peer_connected();
}

void Endpoint::Impl::remove(const std::shared_ptr<WsSession>& s) {
  if (sessions.erase(s) == 0) return;
  peers = sessions.size();
  spdlog::info("bridge: peer disconnected ({} left)", sessions.size());
  if (callbacks.on_peer_lost) callbacks.on_peer_lost();
  schedule_retry();
}

void Endpoint::Impl::handle_frame(const std::string& text) {
  try {
    const InboundMessage msg = decode_inbound(text);
    if (callbacks.on_message) callbacks.on_message(msg);
  } catch (const ProtocolError& e) {
    ++malformed;
    spdlog::warn("bridge: dropping frame: {}", e.what());
  } catch (const std::invalid_argument& e) {
    ++malformed;
    spdlog::warn("bridge: dropping frame: {}", e.what());
  }
}

void Endpoint::Impl::broadcast(std::string frame) {
  if (!thread.joinable()) return;
  auto shared = std::make_shared<const std::string>(std::move(frame));
  asio::post(ioc, [this, shared] {
    for (const auto& s : sessions) s->send(shared);
  });
}

// ---------------------------------------------------------------------------

Endpoint::Endpoint(BridgeConfig config, EndpointCallbacks callbacks,
                   EndpointOptions options)
    : impl_(std::make_shared<Impl>(std::move(config), std::move(callbacks),
                                   std::move(options))) {}

Endpoint::~Endpoint() { stop(); }

void Endpoint::start() { impl_->start(); }
void Endpoint::stop() { impl_->stop(); }
void Endpoint::broadcast(std::string frame) {
  impl_->broadcast(std::move(frame));
}

ConnectionStatus Endpoint::status() const {
  return impl_->peers.load() > 0 ? ConnectionStatus::kConnected
                                 : ConnectionStatus::kDisconnected;
}

std::size_t Endpoint::peer_count() const { return impl_->peers.load(); }
std::uint64_t Endpoint::dial_attempts() const { return impl_->dials.load(); }
std::uint64_t Endpoint::malformed_frames() const {
  return impl_->malformed.load();
}
const BridgeConfig& Endpoint::config() const { return impl_->config; }
std::uint16_t Endpoint::local_port() const { return impl_->bound_port.load(); }

}  // namespace minidrive::bridge
