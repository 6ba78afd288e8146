#pragma once

#include <Eigen/Core>
#include <cmath>

namespace cfear {

using Point2 = Eigen::Vector2d;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double theta) {
  double t = std::remainder(theta, 2.0 * M_PI);  // [-pi, pi]
  if (t <= -M_PI) t += 2.0 * M_PI;
  return t;
}

/// Rigid transform / pose in the plane, angle kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  static Pose2 identity() { return {}; }

  Eigen::Vector2d translation() const { return {x, y}; }

  Eigen::Matrix2d rotation() const {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
  }

  bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta);
  }
};

/// a then b: rotate b's translation into a's frame, add, sum angles.
inline Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return Pose2(a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta);
}

inline Pose2 inverse(const Pose2& p) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  return Pose2(-c * p.x - s * p.y, s * p.x - c * p.y, -p.theta);
}

/// a^{-1} * b, i.e. b expressed in the frame of a.
inline Pose2 relative(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  const double dx = b.x - a.x, dy = b.y - a.y;
  return Pose2(c * dx + s * dy, -s * dx + c * dy, b.theta - a.theta);
}

inline Point2 transform_point(const Pose2& pose, const Point2& pt) {
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  return {pose.x + c * pt.x() - s * pt.y(), pose.y + s * pt.x() + c * pt.y()};
}

/// Rotation part only; for directions and normals.
inline Eigen::Vector2d rotate(const Pose2& pose, const Eigen::Vector2d& v) {
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

/// Body-frame velocity [vx vy omega].
struct Velocity2 {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  Velocity2() = default;
  Velocity2(double vx_, double vy_, double omega_) : vx(vx_), vy(vy_), omega(omega_) {}

  static Velocity2 zero() { return {}; }

  Velocity2 operator-() const { return {-vx, -vy, -omega}; }
  Velocity2 operator*(double s) const { return {vx * s, vy * s, omega * s}; }

  double speed() const { return std::hypot(vx, vy); }
  bool is_finite() const {
    return std::isfinite(vx) && std::isfinite(vy) && std::isfinite(omega);
  }
};

}  // namespace cfear
