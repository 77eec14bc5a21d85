#include "minidrive/bridge/mailbox.hpp"

namespace minidrive::bridge {

bool Mailbox::post(const InboundMessage& msg) {
  std::lock_guard lock(mutex_);
  if (const auto* incoming = std::get_if<CommandMessage>(&msg);
      incoming && !pending_.empty()) {
    if (auto* last = std::get_if<CommandMessage>(&pending_.back());
        last && last->source == incoming->source) {
      last->command = incoming->command;
      if (incoming->lamps.headlights) {
        last->lamps.headlights = incoming->lamps.headlights;
      }
      if (incoming->lamps.indicators) {
        last->lamps.indicators = incoming->lamps.indicators;
      }
      return true;
    }
  }
  if (pending_.size() >= capacity_) return false;
  pending_.push_back(msg);
  return true;
}

void Mailbox::peer_lost() {
  CommandMessage stop;
  stop.source = CommandSource::kAutonomous;
  std::lock_guard lock(mutex_);
  // Always accepted: a full backlog must not keep a stale drive command.
  pending_.push_back(stop);
}

void Mailbox::drain_into(Simulator& sim) {
  std::vector<InboundMessage> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(pending_);
  }
  for (const InboundMessage& msg : batch) dispatch(msg, sim);
}

std::size_t Mailbox::pending() const {
  std::lock_guard lock(mutex_);
  return pending_.size();
}

}  // namespace minidrive::bridge
