#pragma once

// Sensor models sampled from ground-truth vehicle state.

#include <array>
#include <cstdint>
#include <random>

#include <Eigen/Geometry>

#include "minidrive/dynamics.hpp"
#include "minidrive/environment.hpp"
#include "minidrive/signals.hpp"

namespace minidrive {

inline constexpr double kGravity = 9.81;

// Throttle and steering sensors report the lagged actuator state,
// renormalized to [-1, 1].
double read_throttle(const VehicleState& state, const VehicleGeometry& geom,
                     const ActuatorLimits& limits);
double read_steering(const VehicleState& state, const ActuatorLimits& limits);

struct EncoderState {
  int ppr = 16;
  std::int64_t ticks_left = 0;
  std::int64_t ticks_right = 0;
  double angle_left = 0.0;   // rad, accumulated wheel angle
  double angle_right = 0.0;

  friend bool operator==(const EncoderState&, const EncoderState&) = default;
};

/// floor(angle / (2 pi / ppr)); negative angles count down.
std::int64_t encoder_ticks(double wheel_angle, int ppr);

EncoderState update_encoders(const EncoderState& enc, double angle_left,
                             double angle_right);

/// Indoor positioning: rear-reference position, z = 0. Gaussian noise with a
/// fixed seed when noise_std > 0.
class Ips {
 public:
  explicit Ips(double noise_std = 0.0, std::uint64_t seed = 1);

  Vector3 read(const VehicleState& state);
  void reseed();

 private:
  double noise_std_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_;
};

struct ImuReading {
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  Vector3 euler = Vector3::Zero();  // roll, pitch, yaw
  Vector3 angular_velocity = Vector3::Zero();
  Vector3 linear_acceleration = Vector3(0.0, 0.0, kGravity);

  friend bool operator==(const ImuReading& a, const ImuReading& b) {
    return a.orientation.coeffs() == b.orientation.coeffs() &&
           a.euler == b.euler && a.angular_velocity == b.angular_velocity &&
           a.linear_acceleration == b.linear_acceleration;
  }
};

/// Body-frame IMU. Acceleration is proper acceleration, so +g on Z at rest.
ImuReading read_imu(const VehicleState& state);

inline constexpr int kLidarRays = 360;

struct LidarConfig {
  double min_range = 0.15;
  double max_range = 12.0;
  double rate_hz = 7.0;
  /// Body-frame offset of the scan origin from the body centre.
  Vector2 mount_offset = Vector2::Zero();

  friend bool operator==(const LidarConfig&, const LidarConfig&) = default;
};

struct LidarScan {
  std::array<double, kLidarRays> ranges;
  std::array<double, kLidarRays> intensities;

  /// All rays missed.
  static LidarScan no_returns(const LidarConfig& config = {});

  friend bool operator==(const LidarScan&, const LidarScan&) = default;
};

Vector2 lidar_origin(const VehicleState& state, const VehicleGeometry& geom,
                     const LidarConfig& config);

/// 360 rays at 1 degree, ray i at azimuth i degrees CCW from body +X, all
/// cast at the same instant. Returns closer than min_range report min_range
/// with zero intensity; misses report max_range with zero intensity; other
/// hits have intensity 1 - d / max_range.
LidarScan lidar_scan(const VehicleState& state, const WorldMap& map,
                     const VehicleGeometry& geom, const LidarConfig& config);

enum class DrivingMode { kManual, kAutonomous };

struct Telemetry {
  double time = 0.0;
  DrivingMode mode = DrivingMode::kManual;
  Gear gear = Gear::kDrive;
  double speed = 0.0;
  double throttle = 0.0;
  double steering = 0.0;
  std::array<std::int64_t, 2> encoder_ticks{0, 0};
  std::array<double, 2> encoder_angles{0.0, 0.0};
  Vector3 ips = Vector3::Zero();
  ImuReading imu;
  LidarScan lidar = LidarScan::no_returns();
  SignalState lamps;
  bool scene_light = true;

  friend bool operator==(const Telemetry&, const Telemetry&) = default;
};

}  // namespace minidrive
