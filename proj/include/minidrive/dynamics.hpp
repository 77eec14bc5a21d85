#pragma once

// Kinematic bicycle model with saturated, first-order-lagged actuators.
//
// Normalized command conventions: throttle > 0 drives forward, < 0 reverses;
// steering > 0 turns right. Physical steer angle is CCW-positive, so a
// positive steering command produces a negative wheel angle.

#include <numbers>
#include <optional>

#include "minidrive/core.hpp"

namespace minidrive {

class ActuatorCommand {
 public:
  ActuatorCommand() = default;
  /// Clamps both channels to [-1, 1]. Throws std::invalid_argument on NaN.
  ActuatorCommand(double throttle, double steering);

  double throttle() const { return throttle_; }
  double steering() const { return steering_; }

  friend bool operator==(const ActuatorCommand&,
                         const ActuatorCommand&) = default;

 private:
  double throttle_ = 0.0;
  double steering_ = 0.0;
};

/// Clamp used by every ingress path (bridge, CLI, UI keys).
double clamp_normalized(double value);

struct ActuatorLimits {
  double steering_max = deg_to_rad(30.0);  // rad
  double drive_max_rpm = 130.0;            // wheel RPM
  double tau_drive = 0.25;                 // s
  double tau_steer = 0.10;                 // s
  double brake_decel = 2.0;                // m/s^2

  double max_wheel_omega() const {
    return drive_max_rpm * 2.0 * std::numbers::pi / 60.0;
  }

  void validate() const;

  friend bool operator==(const ActuatorLimits&,
                         const ActuatorLimits&) = default;
};

/// Top speed in m/s implied by the drive limit and wheel radius.
double max_speed(const ActuatorLimits& limits, const VehicleGeometry& geom);

enum class Gear { kDrive, kReverse };

char gear_letter(Gear gear);

struct VehicleState {
  Pose2D pose;             // rear-axle reference point
  double speed = 0.0;      // m/s, signed along body +X
  double yaw_rate = 0.0;   // rad/s
  double steer_angle = 0.0;  // rad, CCW-positive
  double wheel_angle_left = 0.0;
  double wheel_angle_right = 0.0;
  ActuatorCommand commanded;
  Gear gear = Gear::kDrive;
  bool braking = true;
  Vector2 accel_body = Vector2::Zero();  // m/s^2, body frame

  static VehicleState at_rest(const Pose2D& pose) {
    VehicleState s;
    s.pose = pose;
    return s;
  }

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ActuatorTargets {
  double steer_angle = 0.0;  // rad
  double wheel_omega = 0.0;  // rad/s
};

/// Rear-reference turning radius L / tan|delta|. std::nullopt means the
/// path is straight (delta == 0). Throws std::domain_error when
/// |delta| >= pi/2 or L is not positive.
std::optional<double> turning_radius(double reference_length,
                                     double steer_angle);

/// Radius traced by the point `reference_length` ahead of the rear
/// reference: L / sin|delta|.
std::optional<double> front_turning_radius(double reference_length,
                                           double steer_angle);

ActuatorTargets apply_limits(const ActuatorCommand& cmd,
                             const ActuatorLimits& limits);

/// Advances the vehicle by one fixed timestep `dt`.
///
/// Actuators relax toward their targets with time constants tau_steer and
/// tau_drive. A zero throttle engages the brake, which removes speed at
/// `brake_decel` until the car stops. The pose is then advanced with the
/// kinematic bicycle relations using the updated speed and steer angle.
VehicleState step(const VehicleState& state, const ActuatorCommand& cmd,
                  double dt, const VehicleGeometry& geom,
                  const ActuatorLimits& limits);

}  // namespace minidrive
