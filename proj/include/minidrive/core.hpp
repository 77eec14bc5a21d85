#pragma once

// Planar geometry shared by every module.
//
// World frame is right-handed and Z-up; the vehicle body frame has X forward,
// Y left, Z up. Yaw is counter-clockwise about +Z and is always kept in
// (-pi, pi].

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace minidrive {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

using Vector2 = Vec2<double>;
using Vector3 = Eigen::Vector3d;

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Wraps an angle into (-pi, pi]. Throws std::domain_error on NaN/inf.
template <typename Scalar>
Scalar wrap_angle(Scalar theta) {
  if (!std::isfinite(theta)) {
    throw std::domain_error("wrap_angle: angle is not finite");
  }
  constexpr Scalar kPi = std::numbers::pi_v<Scalar>;
  // remainder() is exact and lands in [-pi, pi].
  Scalar r = std::remainder(theta, Scalar(2) * kPi);
  if (r <= -kPi) r += Scalar(2) * kPi;
  return r;
}

template <typename Scalar>
Mat2<Scalar> rotation(Scalar yaw) {
  return Eigen::Rotation2D<Scalar>(yaw).toRotationMatrix();
}

template <typename Scalar>
Vec2<Scalar> heading(Scalar yaw) {
  using std::cos;
  using std::sin;
  return Vec2<Scalar>(cos(yaw), sin(yaw));
}

template <typename Scalar>
struct Pose2 {
  Vec2<Scalar> position = Vec2<Scalar>::Zero();
  Scalar yaw = Scalar(0);

  Pose2() = default;
  Pose2(Scalar x, Scalar y, Scalar yaw_rad)
      : position(x, y), yaw(wrap_angle(yaw_rad)) {}
  Pose2(const Vec2<Scalar>& p, Scalar yaw_rad)
      : position(p), yaw(wrap_angle(yaw_rad)) {}

  Scalar x() const { return position.x(); }
  Scalar y() const { return position.y(); }

  friend bool operator==(const Pose2& a, const Pose2& b) {
    return a.position == b.position && a.yaw == b.yaw;
  }
};

using Pose2D = Pose2<double>;

/// Maps a body-frame point into the world frame.
template <typename Scalar, typename Derived>
Vec2<Scalar> body_to_world(const Pose2<Scalar>& pose,
                           const Eigen::MatrixBase<Derived>& v_body) {
  return pose.position + rotation(pose.yaw) * v_body;
}

template <typename Scalar, typename Derived>
Vec2<Scalar> world_to_body(const Pose2<Scalar>& pose,
                           const Eigen::MatrixBase<Derived>& v_world) {
  return rotation(pose.yaw).transpose() * (v_world - pose.position);
}

/// Physical dimensions of the scaled car. The pose reference point is the
/// rear axle centre; the body rectangle extends forward from it.
struct VehicleGeometry {
  double wheelbase = 0.30;
  double track = 0.16;
  double body_length = 0.30;
  double body_width = 0.16;
  double wheel_radius = 0.0325;
  double lidar_height = 0.15;

  /// Body-frame offset of the body centre from the rear reference point.
  Vector2 body_center_offset() const { return {wheelbase / 2.0, 0.0}; }

  void validate() const;

  friend bool operator==(const VehicleGeometry&,
                         const VehicleGeometry&) = default;
};

}  // namespace minidrive
