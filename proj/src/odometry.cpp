#include "cfear/odometry.hpp"

#include <chrono>

#include "cfear/errors.hpp"

namespace cfear {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

/// Body twist recovering the registered relative motion over dt: the SE(2)
/// log of relative(prev, next). Constant along the step, so it matches the
/// frame convention of both prediction and sweep compensation.
Velocity2 velocity_from_motion(const Pose2& prev, const Pose2& next, double dt) {
  const Pose2 d = relative(prev, next);
  double vx, vy;
  if (std::abs(d.theta) < 1e-9) {
    vx = d.x;
    vy = d.y;
  } else {
    // inverse left Jacobian of the planar rotation
    const double half = 0.5 * d.theta;
    const double cot = half / std::tan(half);
    vx = cot * d.x + half * d.y;
    vy = -half * d.x + cot * d.y;
  }
  return {vx / dt, vy / dt, d.theta / dt};
}

void push_keyframe(OdometryState& state, const SurfacePointSet& local, const Pose2& pose,
                   double stamp, int window) {
  Keyframe kf;
  kf.surface_points = transform_set(local, pose);
  kf.pose = pose;
  kf.stamp = stamp;
  state.keyframes.push_back(std::move(kf));
  while (static_cast<int>(state.keyframes.size()) > window) state.keyframes.pop_front();
}

}  // namespace

ScanResult process_scan(OdometryState& state, const PolarScan& scan, const OdometryConfig& cfg) {
  ScanResult result;
  const double t_start = now_seconds();

  if (state.initialized && !(scan.stamp > state.last_stamp))
    throw InputError("scan stamp " + std::to_string(scan.stamp) + " does not advance past " +
                     std::to_string(state.last_stamp));

  double t = now_seconds();
  const std::vector<Detection> detections = apply_filter(scan, cfg.filter);
  result.detection_count = static_cast<int>(detections.size());
  PointCloud cloud = to_cartesian(scan, detections);
  result.timing.filter = now_seconds() - t;

  t = now_seconds();
  if (cfg.motion_compensation && state.initialized)
    cloud = compensate(cloud, DistortionModel{state.velocity, scan.sweep_duration});
  result.timing.compensate = now_seconds() - t;

  t = now_seconds();
  const SurfacePointSet surface = compute_surface_points(cloud, cfg.feature);
  result.surface_point_count = static_cast<int>(surface.size());
  result.timing.features = now_seconds() - t;

  if (!state.initialized) {
    state.pose = Pose2::identity();
    state.velocity = Velocity2::zero();
    state.keyframes.clear();
    push_keyframe(state, surface, state.pose, scan.stamp, cfg.keyframe_count_s);
    state.last_stamp = scan.stamp;
    state.initialized = true;
    result.registration.pose = state.pose;
    result.registration.converged = true;
    result.timing.total = now_seconds() - t_start;
    return result;
  }

  const double dt = scan.stamp - state.last_stamp;
  const Pose2 predicted = predict(state.pose, state.velocity, dt);

  t = now_seconds();
  std::vector<SurfacePointSet> targets;
  targets.reserve(state.keyframes.size());
  for (const Keyframe& kf : state.keyframes) targets.push_back(kf.surface_points);
  result.registration = register_scan(surface, targets, predicted, cfg.registration);
  result.timing.registration = now_seconds() - t;

  Pose2 new_pose = result.registration.pose;
  if (!result.registration.converged) {
    new_pose = predicted;
    result.fallback = true;
  }

  state.velocity = velocity_from_motion(state.pose, new_pose, dt);
  state.pose = new_pose;
  state.last_stamp = scan.stamp;

  const Pose2 since_kf = relative(state.keyframes.back().pose, new_pose);
  if (since_kf.translation().norm() > cfg.keyframe_min_dist ||
      std::abs(since_kf.theta) > cfg.keyframe_min_rot)
    push_keyframe(state, surface, new_pose, scan.stamp, cfg.keyframe_count_s);

  result.timing.total = now_seconds() - t_start;
  return result;
}

SequenceResult run_sequence(const std::vector<PolarScan>& scans, const OdometryConfig& cfg) {
  SequenceResult out;
  OdometryState state;
  out.trajectory.reserve(scans.size());
  out.per_scan.reserve(scans.size());
  for (const PolarScan& scan : scans) {
    ScanResult r = process_scan(state, scan, cfg);
    TimedPose tp;
    tp.stamp = scan.stamp;
    tp.pose = state.pose;
    if (r.registration.covariance_valid) tp.covariance = r.registration.covariance;
    out.trajectory.push_back(tp);
    if (r.fallback) ++out.fallback_count;

    out.mean_timing.filter += r.timing.filter;
    out.mean_timing.compensate += r.timing.compensate;
    out.mean_timing.features += r.timing.features;
    out.mean_timing.registration += r.timing.registration;
    out.mean_timing.total += r.timing.total;
    out.max_timing.filter = std::max(out.max_timing.filter, r.timing.filter);
    out.max_timing.compensate = std::max(out.max_timing.compensate, r.timing.compensate);
    out.max_timing.features = std::max(out.max_timing.features, r.timing.features);
    out.max_timing.registration = std::max(out.max_timing.registration, r.timing.registration);
    out.max_timing.total = std::max(out.max_timing.total, r.timing.total);
    out.per_scan.push_back(std::move(r));
  }
  if (!scans.empty()) {
    const double n = static_cast<double>(scans.size());
    out.mean_timing.filter /= n;
    out.mean_timing.compensate /= n;
    out.mean_timing.features /= n;
    out.mean_timing.registration /= n;
    out.mean_timing.total /= n;
  }
  return out;
}

}  // namespace cfear
