#pragma once

#include <cstddef>
#include <mutex>
#include <vector>

#include "minidrive/bridge/protocol.hpp"

namespace minidrive::bridge {

/// Hand-off from network threads to the simulation thread. Consecutive
/// commands from the same source collapse into the newest one (lamp fields
/// merge), so the backlog between two ticks stays small.
class Mailbox {
 public:
  explicit Mailbox(std::size_t capacity = 256) : capacity_(capacity) {}

  /// Any thread. Returns false when the backlog is full and the message was
  /// dropped.
  bool post(const InboundMessage& msg);

  /// Any thread. A peer went away: stop acting on its last drive command.
  void peer_lost();

  /// Simulation thread. Applies pending messages in arrival order.
  void drain_into(Simulator& sim);

  std::size_t pending() const;

 private:
  mutable std::mutex mutex_;
  std::vector<InboundMessage> pending_;
  std::size_t capacity_;
};

}  // namespace minidrive::bridge
