#pragma once

#include <string>
#include <vector>

#include "cfear/radar_io.hpp"

namespace cfear {

struct SegmentDrift {
  double length = 0.0;           // nominal segment length, meters
  double translation_error = 0.0;  // percent
  double rotation_error = 0.0;     // degrees per meter
  int count = 0;                   // segments evaluated; 0 marks an empty bucket
};

struct DriftReport {
  double translation_error = 0.0;  // percent, averaged over all segments
  double rotation_error = 0.0;     // deg/m, averaged over all segments
  std::vector<SegmentDrift> per_length;
  int segment_count = 0;
  bool empty = false;  // trajectory shorter than the smallest segment
};

struct RpeReport {
  double rpe_mean = 0.0;                    // meters
  Eigen::Vector2d bias{0.0, 0.0};           // longitudinal, lateral (gt body frame)
  double rotation_bias = 0.0;               // radians, signed
};

/// Average relative error over all sub-segments of the given path lengths,
/// one segment per start pose: translation in percent, rotation in deg/m.
DriftReport kitti_drift(const Trajectory& est, const Trajectory& gt,
                        const std::vector<double>& segment_lengths, int stride = 1);

/// Mean consecutive relative-pose error, plus its signed componentwise mean.
/// Throws InputError for trajectories shorter than 2 poses or length mismatch.
RpeReport rpe(const Trajectory& est, const Trajectory& gt);

/// Position RMSE after the best rigid alignment of est onto gt.
double ate(const Trajectory& est, const Trajectory& gt);

/// Closed-form least-squares SE(2) alignment mapping est positions onto gt.
Pose2 align_trajectories(const Trajectory& est, const Trajectory& gt);

/// Human-readable report plus `metric,name,value` CSV lines.
std::string format_report(const DriftReport& drift, const RpeReport& rpe_report, double ate_value);
std::string format_report_csv(const DriftReport& drift, const RpeReport& rpe_report,
                              double ate_value);

}  // namespace cfear
