#pragma once

// Runs a Simulator against one or more bridge endpoints: inbound frames are
// queued by the network threads and applied at the top of each tick, and
// every telemetry frame is broadcast to all peers.

#include <atomic>
#include <memory>
#include <optional>
#include <vector>

#include "minidrive/bridge/endpoint.hpp"
#include "minidrive/bridge/mailbox.hpp"
#include "minidrive/simulator.hpp"

namespace minidrive::bridge {

struct RunOptions {
  double speed = 1.0;          // sim seconds per wall second
  bool headless_fast = false;  // no pacing at all
  std::optional<double> duration;  // sim seconds; run until stopped if unset
};

class SimulationHost {
 public:
  explicit SimulationHost(Simulator& sim);
  ~SimulationHost();
  SimulationHost(const SimulationHost&) = delete;
  SimulationHost& operator=(const SimulationHost&) = delete;

  Endpoint& add_endpoint(BridgeConfig config, EndpointOptions options = {});

  void start();
  void stop();

  /// Applies queued bridge input, then advances one tick.
  void step();

  /// Steps until `stop_flag` is set or the duration elapses. Returns the
  /// number of ticks taken.
  std::int64_t run(const RunOptions& options,
                   const std::atomic<bool>& stop_flag);

  Mailbox& mailbox() { return mailbox_; }
  const std::vector<std::unique_ptr<Endpoint>>& endpoints() const {
    return endpoints_;
  }

 private:
  Simulator& sim_;
  Mailbox mailbox_;
  std::vector<std::unique_ptr<Endpoint>> endpoints_;
  Simulator::TelemetrySink previous_sink_;
};

}  // namespace minidrive::bridge
