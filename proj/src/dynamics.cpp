#include "minidrive/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minidrive {
namespace {

// Exact discretisation of a first-order lag over one step.
double lag_gain(double dt, double tau) {
  if (tau <= 0.0) return 1.0;
  return -std::expm1(-dt / tau);
}

}  // namespace

double clamp_normalized(double value) {
  if (std::isnan(value)) {
    throw std::invalid_argument("actuator command is NaN");
  }
  return std::clamp(value, -1.0, 1.0);
}

ActuatorCommand::ActuatorCommand(double throttle, double steering)
    : throttle_(clamp_normalized(throttle)),
      steering_(clamp_normalized(steering)) {}

void ActuatorLimits::validate() const {
  if (!(steering_max > 0.0 && steering_max < std::numbers::pi / 2.0)) {
    throw std::invalid_argument("actuator limits: steering_max out of (0, pi/2)");
  }
  if (!(drive_max_rpm > 0.0)) {
    throw std::invalid_argument("actuator limits: drive_max_rpm must be > 0");
  }
  if (!(tau_drive >= 0.0) || !(tau_steer >= 0.0)) {
    throw std::invalid_argument("actuator limits: time constants must be >= 0");
  }
  if (!(brake_decel > 0.0)) {
    throw std::invalid_argument("actuator limits: brake_decel must be > 0");
  }
}

double max_speed(const ActuatorLimits& limits, const VehicleGeometry& geom) {
  return limits.max_wheel_omega() * geom.wheel_radius;
}

char gear_letter(Gear gear) { return gear == Gear::kReverse ? 'R' : 'D'; }

std::optional<double> turning_radius(double reference_length,
                                     double steer_angle) {
  if (!(reference_length > 0.0)) {
    throw std::domain_error("turning_radius: reference length must be > 0");
  }
  if (!(std::abs(steer_angle) < std::numbers::pi / 2.0)) {
    throw std::domain_error("turning_radius: |steer angle| must be < pi/2");
  }
  if (steer_angle == 0.0) return std::nullopt;
  return reference_length / std::tan(std::abs(steer_angle));
}

std::optional<double> front_turning_radius(double reference_length,
                                           double steer_angle) {
  if (!turning_radius(reference_length, steer_angle)) return std::nullopt;
  return reference_length / std::sin(std::abs(steer_angle));
}

ActuatorTargets apply_limits(const ActuatorCommand& cmd,
                             const ActuatorLimits& limits) {
  return {-cmd.steering() * limits.steering_max,
          cmd.throttle() * limits.max_wheel_omega()};
}

VehicleState step(const VehicleState& state, const ActuatorCommand& cmd,
                  double dt, const VehicleGeometry& geom,
                  const ActuatorLimits& limits) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");

  const ActuatorTargets target = apply_limits(cmd, limits);
  VehicleState next = state;
  next.commanded = cmd;
  next.gear = cmd.throttle() < 0.0 ? Gear::kReverse : Gear::kDrive;
  next.braking = cmd.throttle() == 0.0;

  // A zero steering command yields a zero target, which re-centres the wheel.
  next.steer_angle =
      std::clamp(state.steer_angle + (target.steer_angle - state.steer_angle) *
                                         lag_gain(dt, limits.tau_steer),
                 -limits.steering_max, limits.steering_max);

  const double v_max = max_speed(limits, geom);
  if (next.braking) {
    const double dv = limits.brake_decel * dt;
    next.speed = std::abs(state.speed) <= dv
                     ? 0.0
                     : state.speed - std::copysign(dv, state.speed);
  } else {
    const double target_speed = target.wheel_omega * geom.wheel_radius;
    next.speed = std::clamp(state.speed + (target_speed - state.speed) *
                                              lag_gain(dt, limits.tau_drive),
                            -v_max, v_max);
  }

  next.yaw_rate = next.speed * std::tan(next.steer_angle) / geom.wheelbase;
  next.pose.position += next.speed * dt * heading(state.pose.yaw);
  next.pose.yaw = wrap_angle(state.pose.yaw + next.yaw_rate * dt);

  // Rear wheels roll without slip; the inner wheel is slower in a turn.
  const double half_track_speed = next.yaw_rate * geom.track / 2.0;
  next.wheel_angle_left +=
      (next.speed - half_track_speed) / geom.wheel_radius * dt;
  next.wheel_angle_right +=
      (next.speed + half_track_speed) / geom.wheel_radius * dt;

  next.accel_body = Vector2((next.speed - state.speed) / dt,
                            next.speed * next.yaw_rate);
  return next;
}

}  // namespace minidrive
