#pragma once

// WebSocket transport for the bridge protocol.
//
// A listen endpoint accepts any number of peers (web UI, Python scripts) and
// also answers plain HTTP: GET /map returns the loaded map file and other
// paths are served from the UI asset directory. A connect endpoint dials a
// user's server and keeps retrying with exponential backoff.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "minidrive/bridge/protocol.hpp"

namespace minidrive::bridge {

namespace detail {
class WsSession;
class HttpSession;
}  // namespace detail

enum class Role { kListen, kConnect };

struct BridgeConfig {
  std::string ip = "127.0.0.1";
  int port = 4567;
  Role role = Role::kListen;

  /// Throws std::invalid_argument unless ip is an IPv4 dotted quad and port
  /// is in [1, 65535].
  void validate() const;

  /// Parses "a.b.c.d:port".
  static BridgeConfig parse(std::string_view endpoint, Role role);
};

bool is_ipv4_dotted_quad(std::string_view ip);

enum class ConnectionStatus { kDisconnected, kConnected };

std::string_view to_string(ConnectionStatus status);

struct EndpointOptions {
  std::chrono::milliseconds retry_initial{250};
  std::chrono::milliseconds retry_max{4000};
  /// Outgoing frames buffered per peer before the oldest are dropped.
  std::size_t max_backlog = 64;
  std::string ui_dir;
  std::string map_json;
};

struct EndpointCallbacks {
  std::function<void(const InboundMessage&)> on_message;
  std::function<void()> on_peer_lost;
  std::function<void()> on_peer_connected;
};

/// Callbacks run on the endpoint's network thread as frames arrive.
class Endpoint {
 public:
  Endpoint(BridgeConfig config, EndpointCallbacks callbacks,
           EndpointOptions options = {});
  ~Endpoint();
  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;

  /// Listen: binds and starts accepting (throws on bind failure).
  /// Connect: starts dialling in the background.
  void start();
  void stop();

  /// Thread-safe. Sends one text frame to every connected peer.
  void broadcast(std::string frame);

  ConnectionStatus status() const;
  std::size_t peer_count() const;
  std::uint64_t dial_attempts() const;
  std::uint64_t malformed_frames() const;
  const BridgeConfig& config() const;
  /// Bound port (listen role, after start()).
  std::uint16_t local_port() const;

 private:
  friend class detail::WsSession;
  friend class detail::HttpSession;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace minidrive::bridge
