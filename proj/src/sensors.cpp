#include "minidrive/sensors.hpp"

#include <cmath>
#include <numbers>

#include "minidrive/physics.hpp"

namespace minidrive {

double read_throttle(const VehicleState& state, const VehicleGeometry& geom,
                     const ActuatorLimits& limits) {
  // Adding +0.0 folds -0.0 into 0.0 so idle readings serialize as 0.0.
  return clamp_normalized(state.speed / max_speed(limits, geom)) + 0.0;
}

double read_steering(const VehicleState& state, const ActuatorLimits& limits) {
  return clamp_normalized(-state.steer_angle / limits.steering_max) + 0.0;
}

std::int64_t encoder_ticks(double wheel_angle, int ppr) {
  const double per_tick = 2.0 * std::numbers::pi / ppr;
  return static_cast<std::int64_t>(std::floor(wheel_angle / per_tick));
}

EncoderState update_encoders(const EncoderState& enc, double angle_left,
                             double angle_right) {
  EncoderState next = enc;
  next.angle_left = angle_left;
  next.angle_right = angle_right;
  next.ticks_left = encoder_ticks(angle_left, enc.ppr);
  next.ticks_right = encoder_ticks(angle_right, enc.ppr);
  return next;
}

Ips::Ips(double noise_std, std::uint64_t seed)
    : noise_std_(noise_std), seed_(seed), rng_(seed) {}

Vector3 Ips::read(const VehicleState& state) {
  Vector3 p(state.pose.x(), state.pose.y(), 0.0);
  if (noise_std_ > 0.0) {
    p.x() += noise_std_ * noise_(rng_);
    p.y() += noise_std_ * noise_(rng_);
  }
  return p;
}

void Ips::reseed() {
  rng_.seed(seed_);
  noise_.reset();
}

ImuReading read_imu(const VehicleState& state) {
  ImuReading imu;
  const double yaw = state.pose.yaw;
  imu.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vector3::UnitZ()));
  imu.euler = Vector3(0.0, 0.0, yaw);
  imu.angular_velocity = Vector3(0.0, 0.0, state.yaw_rate);
  imu.linear_acceleration =
      Vector3(state.accel_body.x(), state.accel_body.y(), kGravity);
  return imu;
}

LidarScan LidarScan::no_returns(const LidarConfig& config) {
  LidarScan scan;
  scan.ranges.fill(config.max_range);
  scan.intensities.fill(0.0);
  return scan;
}

Vector2 lidar_origin(const VehicleState& state, const VehicleGeometry& geom,
                     const LidarConfig& config) {
  return body_to_world(state.pose,
                       geom.body_center_offset() + config.mount_offset);
}

LidarScan lidar_scan(const VehicleState& state, const WorldMap& map,
                     const VehicleGeometry& geom, const LidarConfig& config) {
  LidarScan scan = LidarScan::no_returns(config);
  const Vector2 origin = lidar_origin(state, geom, config);
  for (int i = 0; i < kLidarRays; ++i) {
    const double azimuth = state.pose.yaw + deg_to_rad(static_cast<double>(i));
    const auto hit = raycast(map, origin, heading(azimuth), config.max_range);
    if (!hit) continue;
    if (hit->range < config.min_range) {
      scan.ranges[i] = config.min_range;
    } else {
      scan.ranges[i] = hit->range;
      scan.intensities[i] = 1.0 - hit->range / config.max_range;
    }
  }
  return scan;
}

}  // namespace minidrive
