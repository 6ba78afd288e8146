#pragma once

#include <deque>
#include <vector>

#include "cfear/features.hpp"
#include "cfear/filtering.hpp"
#include "cfear/motion.hpp"
#include "cfear/radar_io.hpp"
#include "cfear/registration.hpp"

namespace cfear {

struct OdometryConfig {
  FilterConfig filter = KStrongestConfig{};
  FeatureConfig feature;
  RegistrationConfig registration;
  int keyframe_count_s = 1;                         // sliding window size
  double keyframe_min_dist = 1.5;                   // meters
  double keyframe_min_rot = 5.0 * M_PI / 180;       // radians
  bool motion_compensation = true;
};

struct Keyframe {
  SurfacePointSet surface_points;  // world frame
  Pose2 pose;
  double stamp = 0.0;
};

struct OdometryState {
  Pose2 pose;
  Velocity2 velocity;
  std::deque<Keyframe> keyframes;  // oldest first, never more than s
  double last_stamp = 0.0;
  bool initialized = false;
};

/// Wall-clock seconds spent in each stage of one scan.
struct StageTiming {
  double filter = 0.0;
  double compensate = 0.0;
  double features = 0.0;
  double registration = 0.0;
  double total = 0.0;
};

struct ScanResult {
  RegistrationResult registration;
  StageTiming timing;
  bool fallback = false;      // pose taken from the constant-velocity prediction
  int detection_count = 0;
  int surface_point_count = 0;
};

/// One pipeline step: filter, convert, compensate, extract surface points,
/// predict, register against the keyframe window, update pose/velocity and
/// the window. The first scan bootstraps the state and becomes the first
/// keyframe. A diverged registration falls back to the prediction; the scan
/// is still consumed. Throws InputError when the scan stamp does not advance.
ScanResult process_scan(OdometryState& state, const PolarScan& scan, const OdometryConfig& cfg);

struct SequenceResult {
  Trajectory trajectory;  // one pose per scan, with covariance where available
  std::vector<ScanResult> per_scan;
  StageTiming mean_timing;
  StageTiming max_timing;
  int fallback_count = 0;
};

/// Runs the pipeline over a time-ordered scan sequence; never aborts mid-way.
SequenceResult run_sequence(const std::vector<PolarScan>& scans, const OdometryConfig& cfg);

}  // namespace cfear
