#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cfear/geometry.hpp"

namespace cfear {

/// One full 360 degree polar sweep: na x nr intensity readings, row = azimuth bin.
///
/// Azimuth bin a points along theta = 2*pi*a/na in the sensor frame (bin 0 = x axis).
/// Range bins are 1-based: bin d covers range d*gamma, stored in column d-1.
struct PolarScan {
  int na = 0;                       // azimuth bins per sweep
  int nr = 0;                       // range bins per azimuth
  double gamma = 0.0;               // meters per range bin
  double sweep_duration = 0.0;      // seconds per full sweep
  double stamp = 0.0;               // time of the sweep center
  std::vector<uint16_t> intensities;  // row-major na x nr

  PolarScan() = default;
  PolarScan(int na_, int nr_, double gamma_, double sweep_duration_, double stamp_)
      : na(na_), nr(nr_), gamma(gamma_), sweep_duration(sweep_duration_), stamp(stamp_),
        intensities(static_cast<size_t>(na_) * nr_, 0) {}

  uint16_t& at(int azimuth, int column) { return intensities[static_cast<size_t>(azimuth) * nr + column]; }
  uint16_t at(int azimuth, int column) const { return intensities[static_cast<size_t>(azimuth) * nr + column]; }

  /// Intensity of 1-based range bin d on azimuth a.
  double intensity(int azimuth, int range_bin) const { return at(azimuth, range_bin - 1); }

  double max_range() const { return nr * gamma; }
  bool valid() const { return na >= 1 && nr >= 1 && gamma > 0.0 && sweep_duration > 0.0; }
};

/// A detection kept by a polar-space filter.
struct Detection {
  int azimuth = 0;    // [0, na)
  int range_bin = 0;  // 1-based, [1, nr]
  double intensity = 0.0;
};

/// One Cartesian radar return in the sensor frame.
struct RadarPoint {
  Point2 pos{0.0, 0.0};
  double intensity = 0.0;
  int azimuth_index = 0;
  double time_offset = 0.0;  // seconds relative to the sweep center
};

struct PointCloud {
  std::vector<RadarPoint> points;
  double stamp = 0.0;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Polar-to-Cartesian conversion: range bin d at azimuth a maps to
/// d*gamma * [cos(2*pi*a/na), sin(2*pi*a/na)]. Each point also gets the
/// time offset of its azimuth within the sweep.
/// Throws InputError for indices outside [0,na) x [1,nr].
PointCloud to_cartesian(const PolarScan& scan, const std::vector<Detection>& detections);

/// Binary scan file ('.cfrad'): little-endian fixed header followed by
/// na*nr row-major uint16 intensities. Round trips bit-exactly.
void write_scan(const PolarScan& scan, const std::string& path);
PolarScan read_scan(const std::string& path);

struct TimedPose {
  double stamp = 0.0;
  Pose2 pose;
  std::optional<Eigen::Matrix3d> covariance;  // over [x y theta]
};

using Trajectory = std::vector<TimedPose>;

/// Text trajectory file ('.traj'): one `stamp x y theta` line per pose.
/// Values are printed with enough digits to round trip doubles exactly.
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

/// Per-pose covariances as text: `stamp c00 c01 c02 c11 c12 c22` (upper triangle).
void write_covariances(const Trajectory& traj, const std::string& path);

/// KITTI-style export: 3x4 row-major pose matrix per line, z = 0 embedding.
void write_kitti_poses(const Trajectory& traj, const std::string& path);

}  // namespace cfear
