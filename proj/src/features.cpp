#include "cfear/features.hpp"

#include <Eigen/Eigenvalues>
#include <optional>

#include "cfear/grid_index.hpp"
#include "cfear/parallel.hpp"

namespace cfear {

namespace {

std::optional<SurfacePoint> build_surface_point(const PointCloud& cloud,
                                                const std::vector<int>& idx,
                                                const FeatureConfig& cfg) {
  const int l = static_cast<int>(idx.size());
  if (l < cfg.min_support) return std::nullopt;

  int first_azimuth = cloud.points[idx[0]].azimuth_index;
  bool single_azimuth = true;
  for (int i : idx) {
    if (cloud.points[i].azimuth_index != first_azimuth) {
      single_azimuth = false;
      break;
    }
  }
  if (single_azimuth) return std::nullopt;

  // Sample weights, normalized by their sum (trace of W).
  std::vector<double> w(idx.size(), 1.0);
  if (cfg.intensity_weighted) {
    double total = 0.0;
    for (size_t i = 0; i < idx.size(); ++i) {
      w[i] = std::max(cloud.points[idx[i]].intensity - cfg.z_min, 0.0);
      total += w[i];
    }
    if (total <= 0.0) std::fill(w.begin(), w.end(), 1.0);  // all at the floor
  }
  double trace = 0.0;
  for (double wi : w) trace += wi;
  for (double& wi : w) wi /= trace;

  Point2 mean(0.0, 0.0);
  for (size_t i = 0; i < idx.size(); ++i) mean += w[i] * cloud.points[idx[i]].pos;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (size_t i = 0; i < idx.size(); ++i) {
    const Eigen::Vector2d d = cloud.points[idx[i]].pos - mean;
    cov += w[i] * d * d.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const double lambda_min = eig.eigenvalues()(0);
  const double lambda_max = eig.eigenvalues()(1);
  if (!(lambda_min > 0.0) || !std::isfinite(lambda_max)) return std::nullopt;
  if (lambda_max / lambda_min > cfg.max_condition) return std::nullopt;

  SurfacePoint sp;
  sp.mean = mean;
  sp.normal = eig.eigenvectors().col(0);
  if (sp.normal.dot(mean) > 0.0) sp.normal = -sp.normal;  // face the sensor
  sp.covariance = cov;
  sp.lambda_min = lambda_min;
  sp.lambda_max = lambda_max;
  sp.planarity = planarity(lambda_min, lambda_max);
  sp.support = l;
  return sp;
}

}  // namespace

SurfacePointSet compute_surface_points(const PointCloud& cloud, const FeatureConfig& cfg) {
  SurfacePointSet set;
  set.stamp = cloud.stamp;

  PointCloud kept;
  kept.stamp = cloud.stamp;
  kept.points.reserve(cloud.points.size());
  const double min_d2 = cfg.min_sensor_dist * cfg.min_sensor_dist;
  for (const RadarPoint& p : cloud.points)
    if (p.pos.squaredNorm() >= min_d2) kept.points.push_back(p);
  if (kept.empty()) return set;

  std::vector<Point2> positions;
  positions.reserve(kept.points.size());
  for (const RadarPoint& p : kept.points) positions.push_back(p.pos);

  const double cell = cfg.resolution_r / cfg.resample_f;
  GridIndex grid(positions, cell);
  const auto cells = grid.occupied_cells();

  std::vector<std::optional<SurfacePoint>> candidates(cells.size());
  parallel_for(cells.size(), [&](size_t c) {
    const auto idx = grid.radius_neighbors(grid.cell_center(cells[c]), cfg.resolution_r);
    candidates[c] = build_surface_point(kept, idx, cfg);
  });

  for (auto& cand : candidates)
    if (cand) set.points.push_back(*cand);
  return set;
}

SurfacePointSet transform_set(const SurfacePointSet& set, const Pose2& pose) {
  SurfacePointSet out;
  out.stamp = set.stamp;
  out.origin = compose(pose, set.origin);
  out.points.reserve(set.points.size());
  const Eigen::Matrix2d r = pose.rotation();
  for (const SurfacePoint& sp : set.points) {
    SurfacePoint t = sp;
    t.mean = transform_point(pose, sp.mean);
    t.normal = r * sp.normal;
    t.covariance = r * sp.covariance * r.transpose();
    out.points.push_back(t);
  }
  return out;
}

}  // namespace cfear
