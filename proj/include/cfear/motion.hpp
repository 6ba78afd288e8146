#pragma once

#include "cfear/geometry.hpp"
#include "cfear/radar_io.hpp"

namespace cfear {

/// Constant-velocity model used to undistort one sweep.
struct DistortionModel {
  Velocity2 velocity;       // estimate from the previous iteration
  double sweep_duration = 0.25;
};

/// Time of azimuth bin a relative to the sweep center: (a/na - 1/2) * sweep_duration.
/// Monotonically increasing in a, zero at a = na/2, spans [-dT/2, dT/2).
inline double time_offset(int azimuth_index, int na, double sweep_duration) {
  return (static_cast<double>(azimuth_index) / na - 0.5) * sweep_duration;
}

/// Projects every point to the sweep-center time: p' = R(-dt*omega) * p - dt*[vx vy].
/// Intensities, azimuth indices and time offsets are preserved.
PointCloud compensate(const PointCloud& cloud, const DistortionModel& model);

/// Constant-velocity pose prediction; the translational velocity is applied
/// in the body frame of prev_pose.
inline Pose2 predict(const Pose2& prev_pose, const Velocity2& v, double dt) {
  return compose(prev_pose, Pose2(v.vx * dt, v.vy * dt, v.omega * dt));
}

}  // namespace cfear
