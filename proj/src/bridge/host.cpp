#include "minidrive/bridge/host.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace minidrive::bridge {

SimulationHost::SimulationHost(Simulator& sim) : sim_(sim) {
  previous_sink_ = sim_.exchange_telemetry_sink([this](const Telemetry& t) {
    if (previous_sink_) previous_sink_(t);
    if (endpoints_.empty()) return;
    const std::string frame = encode_telemetry(t);
    for (const auto& ep : endpoints_) ep->broadcast(frame);
  });
}

SimulationHost::~SimulationHost() {
  stop();
  sim_.set_telemetry_sink(std::move(previous_sink_));
}

Endpoint& SimulationHost::add_endpoint(BridgeConfig config,
                                       EndpointOptions options) {
  EndpointCallbacks callbacks;
  callbacks.on_message = [this](const InboundMessage& msg) {
    mailbox_.post(msg);
  };
  callbacks.on_peer_lost = [this] { mailbox_.peer_lost(); };
  endpoints_.push_back(std::make_unique<Endpoint>(
      std::move(config), std::move(callbacks), std::move(options)));
  return *endpoints_.back();
}

void SimulationHost::start() {
  for (const auto& ep : endpoints_) ep->start();
}

void SimulationHost::stop() {
  for (const auto& ep : endpoints_) ep->stop();
}

void SimulationHost::step() {
  mailbox_.drain_into(sim_);
  sim_.tick();
}

std::int64_t SimulationHost::run(const RunOptions& options,
                                 const std::atomic<bool>& stop_flag) {
  if (!(options.speed > 0.0)) {
    throw std::invalid_argument("run: speed must be positive");
  }
  using Clock = std::chrono::steady_clock;
  const double dt = sim_.config().dt;
  const auto period = std::chrono::duration<double>(dt / options.speed);
  const std::int64_t limit =
      options.duration
          ? static_cast<std::int64_t>(std::llround(*options.duration / dt))
          : -1;

  const auto start = Clock::now();
  auto window_start = start;
  std::int64_t window_ticks = 0;
  std::int64_t ticks = 0;

  while (!stop_flag.load() && (limit < 0 || ticks < limit)) {
    step();
    ++ticks;
    ++window_ticks;

    const auto now = Clock::now();
    const std::chrono::duration<double> window = now - window_start;
    if (window.count() >= 1.0) {
      sim_.mutable_clock().fps_estimate = window_ticks / window.count();
      window_start = now;
      window_ticks = 0;
    }
    if (!options.headless_fast) {
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<Clock::duration>(period * ticks));
    }
  }
  return ticks;
}

}  // namespace minidrive::bridge
