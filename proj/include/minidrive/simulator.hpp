#pragma once

// Fixed-timestep simulator. One thread owns a Simulator; everything it
// exposes is a plain value snapshot.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minidrive/dynamics.hpp"
#include "minidrive/environment.hpp"
#include "minidrive/physics.hpp"
#include "minidrive/sensors.hpp"
#include "minidrive/signals.hpp"

namespace minidrive {

struct SimConfig {
  double dt = 0.005;
  double telemetry_rate = 30.0;
  std::string map_path;
  Pose2D initial_pose;
  VehicleGeometry geometry;
  ActuatorLimits limits;
  LidarConfig lidar;
  CollisionParams collision;
  double ips_noise_std = 0.0;
  std::uint64_t noise_seed = 1;

  /// Throws std::invalid_argument on a non-positive timestep or rate, or
  /// invalid geometry/limits.
  void validate() const;
};

std::string_view to_string(DrivingMode mode);

enum class ControlAction {
  kReset,
  kModeManual,
  kModeAutonomous,
  kSceneLightOn,
  kSceneLightOff,
};

std::string_view to_string(ControlAction action);
std::optional<ControlAction> parse_control_action(std::string_view name);

/// Simulation clock. Time is derived from the integer tick count so it never
/// accumulates rounding error.
struct SimClock {
  std::int64_t tick_count = 0;
  double dt = 0.005;
  double fps_estimate = 0.0;  // ticks per wall-clock second

  double sim_time() const { return static_cast<double>(tick_count) * dt; }
};

/// Emits on the first tick at or after each threshold k / rate_hz, k >= 1.
class RateSchedule {
 public:
  RateSchedule(double rate_hz, double dt);

  /// True when tick `tick_count` reaches the next threshold.
  bool due(std::int64_t tick_count);
  void reset();
  std::int64_t emitted() const { return next_k_ - 1; }

 private:
  std::int64_t threshold_tick(std::int64_t k) const;

  double ticks_per_emission_;
  std::int64_t next_k_ = 1;
  std::int64_t next_tick_;
};

class Recorder;

class Simulator {
 public:
  using TelemetrySink = std::function<void(const Telemetry&)>;

  Simulator(SimConfig config, WorldMap map);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Advances one timestep: command selection, dynamics, contacts, lamps,
  /// then any sensor emissions that have come due.
  void tick();

  /// Back to initial conditions. Mode and scene light are kept.
  void reset();
  void set_mode(DrivingMode mode);
  void set_scene_light(bool on);
  void apply(ControlAction action);

  /// Keyboard/UI driving input; used only in manual mode.
  void set_manual_command(const ActuatorCommand& cmd);
  /// Bridge driving input; used only in autonomous mode.
  void set_autonomous_command(const ActuatorCommand& cmd);
  /// Lamp requests are honoured in either mode.
  void request_lamps(const LampRequest& request);

  void set_telemetry_sink(TelemetrySink sink) { sink_ = std::move(sink); }
  TelemetrySink exchange_telemetry_sink(TelemetrySink sink) {
    return std::exchange(sink_, std::move(sink));
  }

  /// Records all inputs from now on. Resets the simulator first so the
  /// recording starts from initial conditions.
  void start_recording(std::ostream& out);
  /// Writes the trailer line (tick count and telemetry digest).
  void stop_recording();

  const SimConfig& config() const { return config_; }
  const SimClock& clock() const { return clock_; }
  SimClock& mutable_clock() { return clock_; }
  const VehicleState& vehicle() const { return state_; }
  const WorldMap& world() const { return world_; }
  const WorldMap& initial_world() const { return initial_world_; }
  const SignalState& signals() const { return signals_; }
  const EncoderState& encoders() const { return encoders_; }
  const LidarScan& latest_scan() const { return latest_scan_; }
  std::int64_t lidar_scan_count() const { return lidar_schedule_.emitted(); }
  std::int64_t telemetry_count() const { return telemetry_schedule_.emitted(); }
  DrivingMode mode() const { return mode_; }
  bool scene_light() const { return scene_light_; }
  ActuatorCommand active_command() const;
  bool last_tick_had_contact() const { return last_contact_; }

  /// Snapshot of every sensor at the current instant.
  Telemetry telemetry();

 private:
  void restore_initial();

  SimConfig config_;
  WorldMap initial_world_;
  WorldMap world_;
  SimClock clock_;
  VehicleState state_;
  SignalState signals_;
  EncoderState encoders_;
  LidarScan latest_scan_;
  Ips ips_;
  RateSchedule lidar_schedule_;
  RateSchedule telemetry_schedule_;
  DrivingMode mode_ = DrivingMode::kManual;
  bool scene_light_ = true;
  ActuatorCommand manual_command_;
  ActuatorCommand autonomous_command_;
  LampRequest lamp_request_;
  bool last_contact_ = false;
  TelemetrySink sink_;
  std::unique_ptr<Recorder> recorder_;
};

class ConfigMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReplayResult {
  std::int64_t ticks = 0;
  std::string telemetry_digest;  // hex SHA-256 of the emitted stream
  std::string recorded_digest;   // from the trailer, if present
  bool matches() const {
    return !recorded_digest.empty() && telemetry_digest == recorded_digest;
  }
};

/// Re-runs a recording on `sim`. An empty source does nothing. Throws
/// ConfigMismatch when the recording was made with a different
/// configuration or map, before any tick is taken.
ReplayResult replay(Simulator& sim, std::istream& source);

/// Running SHA-256 over a sequence of telemetry frames.
class TelemetryDigest {
 public:
  TelemetryDigest();
  ~TelemetryDigest();
  TelemetryDigest(const TelemetryDigest&) = delete;
  TelemetryDigest& operator=(const TelemetryDigest&) = delete;

  void add(std::string_view frame);
  void add(const Telemetry& t);
  /// Hex digest of everything added so far.
  std::string hex() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace minidrive
