#pragma once

#include <vector>

#include <Eigen/Core>

#include "cfear/geometry.hpp"
#include "cfear/radar_io.hpp"

namespace cfear {

struct FeatureConfig {
  double resolution_r = 3.0;       // neighborhood radius, also the grid scale
  double resample_f = 1.0;         // grid cell = resolution_r / resample_f
  bool intensity_weighted = true;  // weight samples by intensity above z_min
  int min_support = 6;             // reject cells with fewer points in radius
  double max_condition = 1e5;      // reject near-singular covariances
  double min_sensor_dist = 2.5;    // drop returns closer than this to the sensor
  double z_min = 60.0;             // intensity offset for the sample weights
};

/// Local landmark summary: weighted mean, covariance, and the normal along
/// the covariance's smallest eigenvector, oriented toward the sensor.
struct SurfacePoint {
  Point2 mean{0.0, 0.0};
  Eigen::Vector2d normal{0.0, 0.0};
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double planarity = 0.0;
  int support = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct SurfacePointSet {
  std::vector<SurfacePoint> points;
  double stamp = 0.0;
  Pose2 origin;  // frame the set is expressed in

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// log(1 + lambda_max/lambda_min); large for line-like neighborhoods.
inline double planarity(double lambda_min, double lambda_max) {
  return std::log(1.0 + std::abs(lambda_max / lambda_min));
}

/// Extracts oriented surface points from a filtered, motion-compensated cloud.
///
/// Points within min_sensor_dist of the origin are dropped first. One candidate
/// is computed per occupied grid cell from all points within resolution_r of the
/// geometric cell center; candidates are rejected when the support is below
/// min_support, all supporting points share one azimuth bin, or the covariance
/// condition number exceeds max_condition. Output order follows cell coordinates.
SurfacePointSet compute_surface_points(const PointCloud& cloud, const FeatureConfig& cfg);

/// The set rigidly moved into the frame `pose` maps from: means and normals
/// rotated/translated, covariances conjugated.
SurfacePointSet transform_set(const SurfacePointSet& set, const Pose2& pose);

}  // namespace cfear
